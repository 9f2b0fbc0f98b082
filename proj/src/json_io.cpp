#include "orbilat/json_io.hpp"

namespace orbilat {

Json spec_to_json(const FieldSpec& spec, int precision) {
    return Json{{"p", spec.p},
                {"f0", spec.f0},
                {"eis_coeffs", spec.eis},
                {"quadratic", spec.quadratic},
                {"precision", precision}};
}

FieldSpec spec_from_json(const Json& j, int* precision_out) {
    FieldSpec spec;
    spec.p = j.at("p").get<long long>();
    spec.f0 = j.at("f0").get<int>();
    if (j.contains("eis_coeffs")) spec.eis = j.at("eis_coeffs").get<std::vector<long long>>();
    spec.quadratic = j.value("quadratic", true);
    if (precision_out) *precision_out = j.value("precision", 0);
    return spec;
}

Json elem_to_json(const RingElem& x) {
    const RingPtr& R = x.ring();
    std::vector<std::uint64_t> coords;
    for (int i = 0; i < R->ncoords(); ++i) coords.push_back(x.coords().v[i]);
    return Json{{"denom", x.denom()}, {"coords", coords}};
}

RingElem elem_from_json(const RingPtr& R, const Json& j) {
    if (j.is_number_integer()) return R->from_int(j.get<long long>());
    Coords c{};
    auto coords = j.at("coords").get<std::vector<std::uint64_t>>();
    if (static_cast<int>(coords.size()) > R->ncoords())
        throw SpecError("coordinate vector longer than the ring supports");
    for (std::size_t i = 0; i < coords.size(); ++i) c.v[i] = coords[i];
    return R->from_coords(j.value("denom", 0), c);
}

Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows; ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(elem_to_json(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Mat mat_from_json(const RingPtr& R, const Json& j, int rows, int cols) {
    if (static_cast<int>(j.size()) != rows) throw SpecError("matrix row count mismatch");
    Mat m = mat_zero(R, rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw SpecError("matrix column count mismatch");
        for (int c = 0; c < cols; ++c) m.at(i, c) = elem_from_json(R, j[i][c]);
    }
    return m;
}

Json vec_to_json(const Vec& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(elem_to_json(x));
    return out;
}

Vec vec_from_json(const RingPtr& R, const Json& j) {
    Vec v;
    for (const auto& e : j) v.push_back(elem_from_json(R, e));
    return v;
}

Json space_to_json(const HermitianSpace& S) {
    return Json{{"ring_spec", spec_to_json(S.ring->spec(), S.ring->precision())},
                {"n", S.n},
                {"gram", mat_to_json(S.gram)},
                {"label", S.label}};
}

HermitianSpace space_from_json(const Json& j, int precision_override) {
    int prec = 0;
    FieldSpec spec = spec_from_json(j.at("ring_spec"), &prec);
    if (precision_override > 0) prec = precision_override;
    if (prec < 2) prec = 12;
    RingPtr R = make_ring(spec, prec);
    int n = j.at("n").get<int>();
    Mat gram = mat_from_json(R, j.at("gram"), n, n);
    return make_space(R, gram, j.value("label", ""));
}

Json pair_to_json(const HermitianSpace& S, const Mat& x, const Vec& j) {
    return Json{{"space", space_to_json(S)}, {"x", mat_to_json(x)}, {"j", vec_to_json(j)}};
}

PairInput pair_from_json(const Json& j, int precision_override) {
    PairInput in;
    in.space = space_from_json(j.at("space"), precision_override);
    in.x = mat_from_json(in.space.ring, j.at("x"), in.space.n, in.space.n);
    in.j = vec_from_json(in.space.ring, j.at("j"));
    if (static_cast<int>(in.j.size()) != in.space.n) throw SpecError("vector length mismatch");
    return in;
}

Json profile_to_json(const InstanceProfile& p) {
    Json j{{"p", p.p},
           {"f0", p.f0},
           {"n", p.n},
           {"parity", p.parity == Parity::Odd ? "odd" : "even"},
           {"seed", p.seed},
           {"cap", p.cap}};
    switch (p.structure) {
        case Structure::Generic: j["structure"] = "generic"; break;
        case Structure::Split: j["structure"] = "split"; break;
        case Structure::Subfield: j["structure"] = "subfield"; break;
    }
    j["kind"] = (p.kind == ElementKind::Lie) ? "lie" : "group";
    if (p.structure == Structure::Split) j["split_parts"] = p.split_parts;
    if (p.structure == Structure::Subfield) {
        j["subfield_minpoly"] = p.subfield_minpoly;
        j["subfield_rank"] = p.subfield_rank;
    }
    if (p.precision) j["precision"] = p.precision;
    return j;
}

InstanceProfile profile_from_json(const Json& j) {
    InstanceProfile p;
    p.p = j.value("p", 3LL);
    p.f0 = j.value("f0", 1);
    p.n = j.value("n", 2);
    std::string par = j.value("parity", "even");
    p.parity = (par == "odd") ? Parity::Odd : Parity::Even;
    std::string st = j.value("structure", "generic");
    if (st == "generic")
        p.structure = Structure::Generic;
    else if (st == "split")
        p.structure = Structure::Split;
    else if (st == "subfield")
        p.structure = Structure::Subfield;
    else
        throw SpecError("unknown structure: " + st);
    std::string kind = j.value("kind", "lie");
    p.kind = (kind == "group") ? ElementKind::Group : ElementKind::Lie;
    p.split_parts = j.value("split_parts", 2);
    if (j.contains("subfield_minpoly"))
        p.subfield_minpoly = j.at("subfield_minpoly").get<std::vector<long long>>();
    p.subfield_rank = j.value("subfield_rank", 1);
    p.seed = j.value("seed", 1ULL);
    p.precision = j.value("precision", 0);
    p.cap = j.value("cap", static_cast<std::size_t>(100000));
    return p;
}

Json report_to_json(const CheckReport& r) {
    return Json{{"identity", r.identity},
                {"inputs_digest", r.inputs_digest},
                {"lhs", r.lhs},
                {"rhs", r.rhs},
                {"verdict", r.pass ? "pass" : "fail"},
                {"precisions", r.precisions},
                {"millis", r.millis},
                {"note", r.note}};
}

Json series_to_json(const LaurentSeries& s) {
    Json out = Json::array();
    for (auto& [e, c] : s.coeff) out.push_back(Json::array({e, c}));
    return out;
}

Json counts_to_json(const std::map<long long, long long>& m) {
    Json out = Json::object();
    for (auto& [k, v] : m) out[std::to_string(k)] = v;
    return out;
}

std::string canonical_dump(const Json& j) { return j.dump(); }

}  // namespace orbilat
