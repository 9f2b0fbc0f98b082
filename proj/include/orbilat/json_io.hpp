#pragma once

// JSON serialization of ring specs, spaces, pairs, profiles and reports.
// Coefficient order is little-endian by degree everywhere; ring elements
// serialize as {denom, coords}.

#include <string>

#include "json.hpp"
#include "orbilat/reductions.hpp"

namespace orbilat {

using Json = nlohmann::json;

Json spec_to_json(const FieldSpec& spec, int precision);
FieldSpec spec_from_json(const Json& j, int* precision_out = nullptr);

Json elem_to_json(const RingElem& x);
RingElem elem_from_json(const RingPtr& R, const Json& j);

Json mat_to_json(const Mat& m);                      // row-major
Mat mat_from_json(const RingPtr& R, const Json& j, int rows, int cols);

Json vec_to_json(const Vec& v);
Vec vec_from_json(const RingPtr& R, const Json& j);

Json space_to_json(const HermitianSpace& S);
HermitianSpace space_from_json(const Json& j, int precision_override = 0);

struct PairInput {
    HermitianSpace space;
    Mat x;
    Vec j;
};
Json pair_to_json(const HermitianSpace& S, const Mat& x, const Vec& j);
PairInput pair_from_json(const Json& j, int precision_override = 0);

Json profile_to_json(const InstanceProfile& p);
InstanceProfile profile_from_json(const Json& j);

Json report_to_json(const CheckReport& r);

Json series_to_json(const LaurentSeries& s);
Json counts_to_json(const std::map<long long, long long>& m);

// canonical (sorted-key, compact) dump used for digests
std::string canonical_dump(const Json& j);

}  // namespace orbilat
