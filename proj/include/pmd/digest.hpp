#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pmd {

/// 64-bit FNV-1a content digest rendered as 16 lowercase hex digits. Used as
/// a cache key and provenance tag, not for integrity against adversaries.
class Digest {
 public:
  Digest& update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  /// Length-prefixed so that ("ab","c") and ("a","bc") differ.
  Digest& field(std::string_view bytes) noexcept {
    const std::string len = std::to_string(bytes.size()) + ":";
    return update(len).update(bytes);
  }

  std::uint64_t value() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string digest_of(std::string_view bytes) {
  return Digest().update(bytes).hex();
}

}  // namespace pmd
