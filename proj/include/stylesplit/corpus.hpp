#pragma once

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylesplit/error.hpp"

namespace stylesplit {

// Half-open range of word indices [start, end), 0-based.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

inline std::size_t intersection_size(const Span& a, const Span& b) {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

// Per-author weights of one fragment; entries are nonnegative and sum to 1.
using WeightVector = std::vector<double>;

struct Fragment {
  Span span;
  WeightVector weights;
};

// One shifted fragmentation of a text. `fragment_size` is 0 for sets whose
// spans vary in length (ground truth, averaged segments).
struct FragmentSet {
  std::size_t offset = 0;
  std::size_t fragment_size = 0;
  std::size_t n = 0;
  std::vector<Fragment> fragments;

  std::size_t size() const { return fragments.size(); }
  std::vector<Span> spans() const {
    std::vector<Span> out;
    out.reserve(fragments.size());
    for (const auto& f : fragments) out.push_back(f.span);
    return out;
  }
};

struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// A tokenized document. Tokens are maximal runs of non-whitespace code
// points of the NFC-normalized source; byte ranges index into `source()`.
class Text {
 public:
  Text() = default;
  Text(std::string normalized_source, std::vector<ByteRange> ranges)
      : source_(std::move(normalized_source)), ranges_(std::move(ranges)) {}

  const std::string& source() const { return source_; }
  std::size_t size() const { return ranges_.size(); }
  bool empty() const { return ranges_.empty(); }
  std::span<const ByteRange> byte_ranges() const { return ranges_; }

  std::string_view token(std::size_t i) const {
    const auto& r = ranges_.at(i);
    return std::string_view(source_).substr(r.begin, r.end - r.begin);
  }

  std::vector<std::string> tokens() const {
    std::vector<std::string> out;
    out.reserve(ranges_.size());
    for (std::size_t i = 0; i < ranges_.size(); ++i) out.emplace_back(token(i));
    return out;
  }

 private:
  std::string source_;
  std::vector<ByteRange> ranges_;
};

namespace detail {

// Byte offset of the first invalid UTF-8 sequence, or npos.
inline std::size_t find_invalid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto len = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < len) {
    const std::int32_t at = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) return static_cast<std::size_t>(at);
  }
  return std::string_view::npos;
}

inline std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw InputError("NFC normalizer unavailable");
  const icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<std::int32_t>(s.size())));
  const icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) throw InputError("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

}  // namespace detail

inline Text tokenize(std::string_view raw) {
  if (const auto bad = detail::find_invalid_utf8(raw);
      bad != std::string_view::npos) {
    throw InputError("invalid UTF-8 at byte " + std::to_string(bad));
  }
  std::string source = detail::nfc(raw);
  std::vector<ByteRange> ranges;

  const auto* p = reinterpret_cast<const std::uint8_t*>(source.data());
  const auto len = static_cast<std::int32_t>(source.size());
  std::int32_t i = 0;
  bool in_token = false;
  std::size_t token_begin = 0;
  while (i < len) {
    const std::int32_t at = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    const bool space = u_isUWhiteSpace(c);
    if (!space && !in_token) {
      in_token = true;
      token_begin = static_cast<std::size_t>(at);
    } else if (space && in_token) {
      in_token = false;
      ranges.push_back({token_begin, static_cast<std::size_t>(at)});
    }
  }
  if (in_token) ranges.push_back({token_begin, source.size()});
  return Text(std::move(source), std::move(ranges));
}

// Original (normalized) bytes from the first token of `span` through the
// last, including any whitespace between them.
inline std::string fragment_text(const Text& text, const Span& span) {
  if (span.start >= span.end || span.end > text.size()) {
    throw ParameterError("span [" + std::to_string(span.start) + ", " +
                         std::to_string(span.end) + ") outside text of " +
                         std::to_string(text.size()) + " words");
  }
  const auto ranges = text.byte_ranges();
  const std::size_t b = ranges[span.start].begin;
  const std::size_t e = ranges[span.end - 1].end;
  return text.source().substr(b, e - b);
}

inline WeightVector uniform_weights(std::size_t n) {
  return WeightVector(n, 1.0 / static_cast<double>(n));
}

// Builds the m = L/s shifted fragment sets. Set j starts at word j*s and
// holds floor((|T| - j*s) / L) fragments of exactly L words; the partial
// fragments at either end are dropped.
inline std::vector<FragmentSet> make_fragment_sets(const Text& text,
                                                   std::size_t fragment_size,
                                                   std::size_t step,
                                                   std::size_t n) {
  if (step == 0 || fragment_size == 0 || step > fragment_size) {
    throw ParameterError("step must satisfy 0 < step <= fragment size");
  }
  if (fragment_size % step != 0) {
    throw ParameterError("step " + std::to_string(step) +
                         " does not divide fragment size " +
                         std::to_string(fragment_size));
  }
  if (n < 1) throw ParameterError("author count must be positive");
  if (text.size() < fragment_size) {
    throw InputError("text has " + std::to_string(text.size()) +
                     " words, fewer than the fragment size " +
                     std::to_string(fragment_size));
  }
  const std::size_t m = fragment_size / step;
  std::vector<FragmentSet> sets;
  sets.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    FragmentSet set;
    set.offset = j * step;
    set.fragment_size = fragment_size;
    set.n = n;
    const std::size_t count = (text.size() - set.offset) / fragment_size;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t start = set.offset + k * fragment_size;
      set.fragments.push_back(
          {Span{start, start + fragment_size}, uniform_weights(n)});
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace stylesplit
