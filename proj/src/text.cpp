#include "prodkg/text.hpp"

#include <algorithm>
#include <cctype>

namespace prodkg::text {

std::string TokenSeq::surface_join(size_t start, size_t end) const {
  std::string out;
  for (size_t i = start; i <= end && i < tokens.size(); ++i) {
    if (i > start) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

static bool is_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

static void emit(std::vector<Token>& out, std::string_view s) {
  if (s.empty()) return;
  out.push_back({std::string(s), fold_case(s)});
}

TokenSeq tokenize(const std::string& s, Field field) {
  TokenSeq seq;
  seq.field = field;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) break;
    std::string_view raw(&s[i], j - i);

    // Peel leading and trailing punctuation into one-char tokens; what is
    // left keeps internal apostrophes/hyphens ("Jerry's", "16-oz").
    size_t lo = 0, hi = raw.size();
    while (lo < hi && is_punct(raw[lo])) ++lo;
    while (hi > lo && is_punct(raw[hi - 1])) --hi;
    for (size_t k = 0; k < lo; ++k) emit(seq.tokens, raw.substr(k, 1));
    emit(seq.tokens, raw.substr(lo, hi - lo));
    for (size_t k = hi; k < raw.size(); ++k) emit(seq.tokens, raw.substr(k, 1));
    i = j;
  }
  return seq;
}

std::vector<Span> match_value_spans(const TokenSeq& seq, const std::string& value,
                                    const std::string& label) {
  std::vector<Span> out;
  TokenSeq v = tokenize(value);
  const size_t m = v.size(), n = seq.size();
  if (m == 0 || m > n) return out;
  size_t i = 0;
  while (i + m <= n) {
    bool hit = true;
    for (size_t k = 0; k < m; ++k)
      if (seq.tokens[i + k].folded != v.tokens[k].folded) {
        hit = false;
        break;
      }
    if (hit) {
      out.push_back({i, i + m - 1, label});
      i += m;  // non-overlapping, greedy from the left
    } else {
      ++i;
    }
  }
  return out;
}

TagSeq bioe_encode(const TokenSeq& seq, const std::vector<Span>& spans) {
  TagSeq tags(seq.size());
  std::vector<bool> used(seq.size(), false);
  for (const auto& sp : spans) {
    if (sp.end >= seq.size() || sp.start > sp.end)
      throw Error("bioe_encode: span out of range");
    for (size_t i = sp.start; i <= sp.end; ++i) {
      if (used[i]) throw Error("bioe_encode: overlapping spans");
      used[i] = true;
    }
    if (sp.start == sp.end) {
      tags[sp.start] = {'B', sp.label};
    } else {
      tags[sp.start] = {'B', sp.label};
      for (size_t i = sp.start + 1; i < sp.end; ++i) tags[i] = {'I', sp.label};
      tags[sp.end] = {'E', sp.label};
    }
  }
  return tags;
}

std::vector<Mention> bioe_decode(const TokenSeq& seq, const TagSeq& tags) {
  if (seq.size() != tags.size()) throw Error("bioe_decode: length mismatch");
  std::vector<Mention> out;
  size_t i = 0;
  const size_t L = tags.size();
  while (i < L) {
    if (tags[i].kind != 'B') {
      ++i;  // stray O/I/E: dropped
      continue;
    }
    const std::string& label = tags[i].label;
    size_t j = i + 1;
    while (j < L && tags[j].kind == 'I' && tags[j].label == label) ++j;
    if (j < L && tags[j].kind == 'E' && tags[j].label == label) {
      out.push_back({label, seq.surface_join(i, j), {i, j, label}});
      i = j + 1;
    } else if (j == i + 1) {
      // bare B: complete length-1 mention
      out.push_back({label, seq.surface_join(i, i), {i, i, label}});
      i = j;
    } else {
      i = j;  // B,I..I without a closing E: malformed, dropped
    }
  }
  return out;
}

size_t edit_distance(const std::string& a, const std::string& b) {
  const size_t m = a.size(), n = b.size();
  std::vector<size_t> prev(n + 1), cur(n + 1);
  for (size_t j = 0; j <= n; ++j) prev[j] = j;
  for (size_t i = 1; i <= m; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= n; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

std::string tag_name(const Tag& t) {
  if (t.kind == 'O') return "O";
  return std::string(1, t.kind) + "-" + t.label;
}

Tag tag_from_name(const std::string& name) {
  if (name == "O") return {'O', ""};
  if (name.size() < 3 || name[1] != '-' ||
      (name[0] != 'B' && name[0] != 'I' && name[0] != 'E'))
    throw Error("bad tag name '" + name + "'");
  return {name[0], name.substr(2)};
}

}  // namespace prodkg::text
