#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace sketchlb {

/// Packed bit sequence. Bits are stored most-significant-first: bit 0 is the
/// first bit written and the first character of `to_string()`. Unused tail
/// bits of the last word are always zero.
class BitString {
 public:
  BitString() = default;

  static BitString from_string(std::string_view text) {
    BitString out;
    for (char c : text) {
      if (c != '0' && c != '1') throw DecodeError("bit string contains '" + std::string(1, c) + "'");
      out.push_back(c == '1');
    }
    return out;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept {
    return (words_[i >> 6] >> (63 - (i & 63))) & 1U;
  }

  void push_back(bool bit) {
    if ((size_ & 63) == 0) words_.push_back(0);
    if (bit) words_.back() |= std::uint64_t{1} << (63 - (size_ & 63));
    ++size_;
  }

  /// Appends the low `width` bits of `value`, high bit first.
  void append(std::uint64_t value, unsigned width) {
    if (width == 0) return;
    if (width < 64) value &= (std::uint64_t{1} << width) - 1;
    const unsigned offset = size_ & 63;
    if (offset == 0) {
      words_.push_back(value << (64 - width));
    } else {
      const unsigned room = 64 - offset;
      if (width <= room) {
        words_.back() |= value << (room - width);
      } else {
        words_.back() |= value >> (width - room);
        words_.push_back(value << (64 - (width - room)));
      }
    }
    size_ += width;
  }

  void append(const BitString& other) {
    for (std::size_t i = 0; i < other.size_; i += 64) {
      const unsigned width = static_cast<unsigned>(std::min<std::size_t>(64, other.size_ - i));
      append(other.words_[i >> 6] >> (64 - width), width);
    }
  }

  /// Reads `width` bits starting at `pos` as an unsigned integer.
  std::uint64_t read(std::size_t pos, unsigned width) const {
    if (pos + width > size_) throw DecodeError("read past end of bit string");
    if (width == 0) return 0;
    const std::size_t word = pos >> 6;
    const unsigned offset = pos & 63;
    std::uint64_t hi = words_[word] << offset;
    if (offset + width > 64) hi |= words_[word + 1] >> (64 - offset);
    return hi >> (64 - width);
  }

  std::string to_string() const {
    std::string out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) out.push_back((*this)[i] ? '1' : '0');
    return out;
  }

  std::size_t popcount() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(__builtin_popcountll(w));
    return total;
  }

  friend bool operator==(const BitString& a, const BitString& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

  /// Lexicographic order; a proper prefix sorts first.
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) noexcept {
    const std::size_t shared = std::min(a.size_, b.size_);
    std::size_t i = 0;
    while (i + 64 <= shared && a.words_[i >> 6] == b.words_[i >> 6]) i += 64;
    for (; i < shared; ++i) {
      if (a[i] != b[i]) return a[i] ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return a.size_ <=> b.size_;
  }

  std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(size_);
    for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Number of bits needed to write any value in [0, max_value].
inline unsigned bit_width_for(std::uint64_t max_value) {
  unsigned w = 0;
  while (max_value > 0) {
    ++w;
    max_value >>= 1;
  }
  return w == 0 ? 1 : w;
}

}  // namespace sketchlb

template <>
struct std::hash<sketchlb::BitString> {
  std::size_t operator()(const sketchlb::BitString& b) const noexcept { return b.hash(); }
};
