#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cassim {

inline constexpr const char* kVersion = "0.1.0";

// Domain/computation failure. The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Half-open byte range [begin, end) into the original source buffer.
struct Span {
  uint32_t begin = 0;
  uint32_t end = 0;

  bool operator==(const Span&) const = default;
  uint32_t length() const { return end - begin; }
};

// FNV-1a, used for input digests and the vocabulary compatibility hash.
inline uint64_t fnv1a(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace cassim
