#include <algorithm>
#include <cstdint>

#include "disco/core.hpp"
#include "disco/error.hpp"

namespace disco {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t byte_start;
  std::size_t byte_end;
};

std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    } else {
      throw ValidationError("invalid UTF-8 lead byte at offset " +
                            std::to_string(i));
    }
    if (i + len > text.size()) {
      throw ValidationError("truncated UTF-8 sequence at offset " +
                            std::to_string(i));
    }
    for (std::size_t k = 1; k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        throw ValidationError("invalid UTF-8 continuation at offset " +
                              std::to_string(i + k));
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[len] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw ValidationError("invalid UTF-8 code point at offset " +
                            std::to_string(i));
    }
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
}

bool is_space(char32_t c) {
  switch (c) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\v':
    case U'\f':
    case U'\r':
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  // Latin-1 punctuation and symbols (¡ « » ¿ etc.), excluding letters.
  if (c >= 0xA1 && c <= 0xBF) return c != 0xAA && c != 0xB5 && c != 0xBA;
  if (c == 0xD7 || c == 0xF7) return true;
  // General Punctuation (after the space block), CJK punctuation, fullwidth
  // ASCII punctuation.
  if (c >= 0x2010 && c <= 0x2027) return true;
  if (c >= 0x2030 && c <= 0x205E) return true;
  if (c >= 0x3001 && c <= 0x3003) return true;
  if (c >= 0x3008 && c <= 0x3011) return true;
  if (c >= 0xFF01 && c <= 0xFF0F) return true;
  return false;
}

}  // namespace

std::size_t utf8_length(std::string_view text) {
  return decode_utf8(text).size();
}

std::vector<Token> tokenize(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i].value)) {
      ++i;
      continue;
    }
    const bool punct = is_punct(cps[i].value);
    std::size_t j = i + 1;
    while (j < cps.size() && !is_space(cps[j].value) &&
           is_punct(cps[j].value) == punct) {
      ++j;
    }
    const std::size_t b = cps[i].byte_start;
    const std::size_t e = cps[j - 1].byte_end;
    tokens.push_back({std::string(text.substr(b, e - b)), i, j});
    i = j;
  }
  return tokens;
}

Document::Document(std::string doc_id, std::string text)
    : doc_id_(std::move(doc_id)), text_(std::move(text)) {
  index_text();
  tokens_ = tokenize(text_);
}

Document::Document(
    std::string doc_id, std::string text,
    std::span<const std::pair<std::size_t, std::size_t>> char_ranges)
    : doc_id_(std::move(doc_id)), text_(std::move(text)) {
  index_text();
  tokens_.reserve(char_ranges.size());
  std::size_t prev_end = 0;
  for (std::size_t k = 0; k < char_ranges.size(); ++k) {
    const auto [start, end] = char_ranges[k];
    if (start >= end) {
      throw ValidationError("token " + std::to_string(k) + " of '" + doc_id_ +
                            "' is empty");
    }
    if (end > char_length()) {
      throw ValidationError("token " + std::to_string(k) + " of '" + doc_id_ +
                            "' exceeds text length");
    }
    if (k > 0 && start < prev_end) {
      throw ValidationError("token " + std::to_string(k) + " of '" + doc_id_ +
                            "' overlaps or precedes its predecessor");
    }
    tokens_.push_back({std::string(slice(start, end)), start, end});
    prev_end = end;
  }
}

void Document::index_text() {
  const auto cps = decode_utf8(text_);
  byte_offset_.clear();
  byte_offset_.reserve(cps.size() + 1);
  for (const auto& cp : cps) byte_offset_.push_back(cp.byte_start);
  byte_offset_.push_back(text_.size());
}

std::string_view Document::slice(std::size_t char_start,
                                 std::size_t char_end) const {
  if (char_start > char_end || char_end > char_length()) {
    throw ValidationError("character range out of bounds in '" + doc_id_ +
                          "'");
  }
  const std::size_t b = byte_offset_[char_start];
  return std::string_view(text_).substr(b, byte_offset_[char_end] - b);
}

Document Document::sub_document(std::string doc_id, std::size_t begin,
                                std::size_t end) const {
  if (begin >= end || end > tokens_.size()) {
    throw ValidationError("token range out of bounds in '" + doc_id_ + "'");
  }
  const std::size_t base = tokens_[begin].char_start;
  const std::size_t stop = tokens_[end - 1].char_end;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  ranges.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    ranges.emplace_back(tokens_[i].char_start - base,
                        tokens_[i].char_end - base);
  }
  return Document(std::move(doc_id), std::string(slice(base, stop)), ranges);
}

bool Document::has_default_tokens() const { return tokens_ == tokenize(text_); }

}  // namespace disco
