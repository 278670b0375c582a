#pragma once

#include <string>

namespace gpival {

// Hex digest of the SHA-256 of `data` (self-contained; used for manifests).
std::string sha256_hex(const std::string& data);

}  // namespace gpival
