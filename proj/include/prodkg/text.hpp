#ifndef PRODKG_TEXT_HPP
#define PRODKG_TEXT_HPP

#include <string>
#include <vector>

#include "prodkg/common.hpp"

namespace prodkg::text {

enum class Field { Title, Description, Bullet, Query, Other };

struct Token {
  std::string surface;
  std::string folded;  // case-folded surface
};

struct TokenSeq {
  std::vector<Token> tokens;
  Field field = Field::Other;

  size_t size() const { return tokens.size(); }
  std::string surface_join(size_t start, size_t end) const;  // inclusive span
};

// Inclusive token span [start, end] with a label.
struct Span {
  size_t start = 0;
  size_t end = 0;
  std::string label;

  bool operator==(const Span&) const = default;
};

// BIOE tag: O, or {B,I,E} x label.
struct Tag {
  char kind = 'O';  // 'O','B','I','E'
  std::string label;

  bool operator==(const Tag&) const = default;
};

using TagSeq = std::vector<Tag>;

struct Mention {
  std::string label;
  std::string surface;
  Span span;
};

// Whitespace split; leading/trailing punctuation becomes separate one-char
// tokens; internal apostrophes and hyphens stay inside their token.
TokenSeq tokenize(const std::string& s, Field field = Field::Other);

// All non-overlapping occurrences of tokenize(value) as a contiguous
// case-folded token subsequence. Leftmost-longest on overlap.
std::vector<Span> match_value_spans(const TokenSeq& seq, const std::string& value,
                                    const std::string& label = "");

// Length-1 span -> B; length-2 -> B,E; longer -> B,I..I,E. Throws on overlap.
TagSeq bioe_encode(const TokenSeq& seq, const std::vector<Span>& spans);

// Inverse of bioe_encode on well-formed input; malformed runs are dropped.
// A bare B not followed by I/E of the same label is a complete length-1 mention.
std::vector<Mention> bioe_decode(const TokenSeq& seq, const TagSeq& tags);

// Levenshtein distance with unit insert/delete/substitute.
size_t edit_distance(const std::string& a, const std::string& b);

std::string tag_name(const Tag& t);
Tag tag_from_name(const std::string& name);

}  // namespace prodkg::text

#endif
