#pragma once

#include <cstdint>
#include <string>

namespace orbilat {

// SHA-256 of a byte string, lowercase hex; used to key scan journals
std::string sha256_hex(const std::string& data);

}  // namespace orbilat
