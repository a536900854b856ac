#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "prodkg/text.hpp"

using namespace prodkg;
using namespace prodkg::text;

static std::vector<std::string> surfaces(const TokenSeq& s) {
  std::vector<std::string> out;
  for (const auto& t : s.tokens) out.push_back(t.surface);
  return out;
}

TEST_CASE("tokenize") {
  auto seq = tokenize("Ben & Jerry's black cherry cheesecake ice cream");
  CHECK(surfaces(seq) == std::vector<std::string>{"Ben", "&", "Jerry's", "black", "cherry",
                                                  "cheesecake", "ice", "cream"});
  CHECK(seq.tokens[2].folded == "jerry's");

  CHECK(tokenize("").size() == 0);
  CHECK(surfaces(tokenize("16-oz bag,")) == std::vector<std::string>{"16-oz", "bag", ","});
  CHECK(surfaces(tokenize("(pack of 6)")) ==
        std::vector<std::string>{"(", "pack", "of", "6", ")"});
  CHECK(surfaces(tokenize("...")) == std::vector<std::string>{".", ".", "."});

  SUBCASE("idempotent on re-joined output") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> pieces{"Choc.",   "16-oz", "&",   "Jerry's", "bag,",
                                          "(fresh)", "a",     "B-12", "zero"};
    for (int it = 0; it < 50; ++it) {
      std::string s;
      const size_t n = 1 + rng() % 6;
      for (size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += pieces[rng() % pieces.size()];
      }
      auto first = tokenize(s);
      std::string joined;
      for (size_t i = 0; i < first.size(); ++i) {
        if (i) joined += ' ';
        joined += first.tokens[i].surface;
      }
      auto second = tokenize(joined);
      CHECK(surfaces(second) == surfaces(first));
    }
  }
}

TEST_CASE("match_value_spans") {
  auto seq = tokenize("Ben & Jerry's black cherry cheesecake ice cream");
  auto spans = match_value_spans(seq, "ice cream");
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == Span{6, 7, ""});

  CHECK(match_value_spans(seq, "vanilla").empty());
  CHECK(match_value_spans(seq, "").empty());

  SUBCASE("case folded") {
    auto spans2 = match_value_spans(seq, "Black CHERRY Cheesecake", "flavor");
    REQUIRE(spans2.size() == 1);
    CHECK(spans2[0] == Span{3, 5, "flavor"});
  }

  SUBCASE("leftmost-longest non-overlap") {
    auto s = tokenize("a a a");
    auto sp = match_value_spans(s, "a a");
    REQUIRE(sp.size() == 1);
    CHECK(sp[0].start == 0);
    CHECK(sp[0].end == 1);
  }

  SUBCASE("matches enumeration oracle") {
    std::mt19937_64 rng(3);
    const std::vector<std::string> alphabet{"a", "b", "c"};
    for (int it = 0; it < 200; ++it) {
      const size_t n = 1 + rng() % 8;
      std::vector<std::string> toks;
      for (size_t i = 0; i < n; ++i) toks.push_back(alphabet[rng() % alphabet.size()]);
      std::string body;
      for (size_t i = 0; i < n; ++i) {
        if (i) body += ' ';
        body += toks[i];
      }
      const size_t m = 1 + rng() % 3;
      std::string value;
      std::vector<std::string> vtoks;
      for (size_t i = 0; i < m; ++i) {
        if (i) value += ' ';
        vtoks.push_back(alphabet[rng() % alphabet.size()]);
        value += vtoks.back();
      }
      auto seq2 = tokenize(body);
      auto got = match_value_spans(seq2, value);

      // oracle: greedy scan over every start position
      std::vector<Span> expect;
      size_t i = 0;
      while (i + m <= n) {
        bool hit = true;
        for (size_t k = 0; k < m; ++k)
          if (toks[i + k] != vtoks[k]) hit = false;
        if (hit) {
          expect.push_back({i, i + m - 1, ""});
          i += m;
        } else {
          ++i;
        }
      }
      CHECK(got == expect);
    }
  }
}

TEST_CASE("bioe_encode") {
  auto seq = tokenize("Ben & Jerry's black cherry cheesecake ice cream");
  auto tags = bioe_encode(seq, {{3, 5, "flavor"}, {6, 7, "type"}});
  std::vector<std::string> names;
  for (const auto& t : tags) names.push_back(tag_name(t));
  CHECK(names == std::vector<std::string>{"O", "O", "O", "B-flavor", "I-flavor", "E-flavor",
                                          "B-type", "E-type"});

  SUBCASE("no spans -> all O") {
    for (const auto& t : bioe_encode(seq, {})) CHECK(t.kind == 'O');
  }
  SUBCASE("single-token span uses bare B") {
    auto s4 = tokenize("w x y z");
    auto t4 = bioe_encode(s4, {{2, 2, "brand"}});
    CHECK(tag_name(t4[0]) == "O");
    CHECK(tag_name(t4[2]) == "B-brand");
    CHECK(tag_name(t4[3]) == "O");
  }
  SUBCASE("overlap throws") {
    CHECK_THROWS_AS(bioe_encode(seq, {{1, 3, "a"}, {3, 4, "b"}}), Error);
  }
}

TEST_CASE("bioe_decode") {
  auto seq = tokenize("a b c d e f");

  SUBCASE("all O") { CHECK(bioe_decode(seq, TagSeq(6)).empty()); }

  SUBCASE("malformed I/E without B is dropped") {
    auto s2 = tokenize("x y");
    TagSeq tags{{'I', "flavor"}, {'E', "flavor"}};
    CHECK(bioe_decode(s2, tags).empty());
  }

  SUBCASE("length mismatch throws") {
    CHECK_THROWS_AS(bioe_decode(seq, TagSeq(3)), Error);
  }

  SUBCASE("B,I with no E is dropped; bare B is a mention") {
    TagSeq tags(6);
    tags[0] = {'B', "x"};
    tags[1] = {'I', "x"};
    tags[3] = {'B', "y"};
    auto m = bioe_decode(seq, tags);
    REQUIRE(m.size() == 1);
    CHECK(m[0].label == "y");
    CHECK(m[0].surface == "d");
  }

  SUBCASE("decode(encode(spans)) round-trip on random span sets") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> labels{"flavor", "type", "brand"};
    for (int it = 0; it < 1000; ++it) {
      const size_t L = 1 + rng() % 12;
      std::vector<std::string> words(L, "w");
      std::string body;
      for (size_t i = 0; i < L; ++i) {
        if (i) body += ' ';
        body += "w" + std::to_string(i);
      }
      auto s = tokenize(body);
      // random non-overlapping spans
      std::vector<Span> spans;
      size_t pos = rng() % 3;
      while (pos < L) {
        const size_t len = 1 + rng() % 3;
        const size_t end = std::min(L - 1, pos + len - 1);
        if (rng() % 2) spans.push_back({pos, end, labels[rng() % labels.size()]});
        pos = end + 1 + rng() % 2;
      }
      auto decoded = bioe_decode(s, bioe_encode(s, spans));
      REQUIRE(decoded.size() == spans.size());
      for (size_t i = 0; i < spans.size(); ++i) CHECK(decoded[i].span == spans[i]);
    }
  }
}

TEST_CASE("edit_distance") {
  CHECK(edit_distance("abc", "abc") == 0);
  CHECK(edit_distance("choc", "chocolate") == 5);
  CHECK(edit_distance("", "ab") == 2);
  CHECK(edit_distance("kitten", "sitting") == 3);

  SUBCASE("metric properties on random strings") {
    std::mt19937_64 rng(13);
    auto rand_str = [&] {
      const size_t n = rng() % 8;
      std::string s;
      for (size_t i = 0; i < n; ++i) s += static_cast<char>('a' + rng() % 3);
      return s;
    };
    for (int it = 0; it < 300; ++it) {
      const std::string a = rand_str(), b = rand_str(), c = rand_str();
      CHECK(edit_distance(a, b) == edit_distance(b, a));
      CHECK((edit_distance(a, b) == 0) == (a == b));
      CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
    }
  }
}
