// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>

#include "doctest.h"
#include "ocrvote/error.hpp"
#include "ocrvote/llocs.hpp"
#include "ocrvote/random.hpp"
#include "ocrvote/utf8.hpp"

using namespace ocrvote;

namespace {

const char* kTableRecord = "a\t126\t136\t0.9665\tn=0.4578;r=0.2365;m=0.0924;k=0.0832\n";

LlocsEntry table_entry() {
  return {U'a', 126, 136, 0.9665, {{U'n', 0.4578}, {U'r', 0.2365}, {U'm', 0.0924}, {U'k', 0.0832}}};
}

// Characters that exercise every escape plus multi-byte UTF-8.
const std::u32string kPool = U"abc xyz\t\\;=\nãäßſꝛ{}0.";

LineHypothesis random_hypothesis(Rng& rng) {
  std::vector<LlocsEntry> entries;
  const std::size_t n = uniform_below(rng, 12);
  int x = 0;
  for (std::size_t i = 0; i < n; ++i) {
    LlocsEntry e;
    e.ch = kPool[uniform_below(rng, kPool.size())];
    x += static_cast<int>(uniform_below(rng, 4));
    e.x_start = x;
    e.x_end = x + static_cast<int>(uniform_below(rng, 9));
    e.conf = static_cast<double>(1 + uniform_below(rng, 1000000)) / 1e6;
    std::u32string used(1, e.ch);
    const std::size_t k = uniform_below(rng, 4);
    for (std::size_t a = 0; a < k; ++a) {
      const char32_t c = kPool[uniform_below(rng, kPool.size())];
      if (used.find(c) != std::u32string::npos) continue;
      used.push_back(c);
      e.alternatives.push_back(
          {c, static_cast<double>(100 + uniform_below(rng, 999901)) / 1e6});
    }
    std::sort(e.alternatives.begin(), e.alternatives.end(),
              [](const Alternative& p, const Alternative& q) { return p.conf > q.conf; });
    entries.push_back(e);
  }
  return make_hypothesis(entries, "m");
}

}  // namespace

TEST_CASE("parse_llocs reads the table record") {
  const LineHypothesis h = parse_llocs(kTableRecord);
  REQUIRE(h.entries.size() == 1);
  CHECK(h.entries[0] == table_entry());
  CHECK(h.text == U"a");
}

TEST_CASE("write_llocs reproduces the table record") {
  CHECK(write_llocs(make_hypothesis({table_entry()})) == kTableRecord);
}

TEST_CASE("empty documents") {
  const LineHypothesis h = parse_llocs("");
  CHECK(h.text.empty());
  CHECK(h.entries.empty());
  CHECK(write_llocs(LineHypothesis{}).empty());
}

TEST_CASE("confidence formatting trims zeros") {
  CHECK(format_confidence(1.0) == "1");
  CHECK(format_confidence(0.5) == "0.5");
  CHECK(format_confidence(0.9665) == "0.9665");
  CHECK(format_confidence(0.1234567) == "0.123457");
}

TEST_CASE("tab in the char field is escaped and round-trips") {
  const LineHypothesis h = make_hypothesis({{U'\t', 0, 3, 0.5, {{U';', 0.25}, {U'=', 0.125}}}});
  const std::string doc = write_llocs(h);
  CHECK(doc == "\\t\t0\t3\t0.5\t\\;=0.25;\\==0.125\n");
  CHECK(parse_llocs(doc) == h);
}

TEST_CASE("records with no alternatives keep the trailing tab") {
  const LineHypothesis h = make_hypothesis({{U'e', 155, 160, 0.9915, {}}});
  CHECK(write_llocs(h) == "e\t155\t160\t0.9915\t\n");
  CHECK(parse_llocs("e\t155\t160\t0.9915\t") == h);
}

TEST_CASE("parse errors") {
  SUBCASE("confidence out of range") {
    try {
      parse_llocs("a\t0\t1\t1.2\t\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(std::string(e.what()).find("confidence out of range") != std::string::npos);
    }
  }
  SUBCASE("zero alternative confidence") {
    CHECK_THROWS_AS(parse_llocs("a\t0\t1\t0.5\tb=0\n"), ParseError);
  }
  SUBCASE("line number reported") {
    try {
      parse_llocs("a\t0\t1\t0.5\t\nb\t2\t3\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("non-monotone x_start") {
    CHECK_THROWS_AS(parse_llocs("a\t10\t12\t0.5\t\nb\t2\t3\t0.5\t\n"), ParseError);
  }
  SUBCASE("x_start after x_end") {
    CHECK_THROWS_AS(parse_llocs("a\t10\t2\t0.5\t\n"), ParseError);
  }
  SUBCASE("alternative duplicating the top-1 character") {
    CHECK_THROWS_AS(parse_llocs("a\t0\t1\t0.5\ta=0.2\n"), ParseError);
  }
  SUBCASE("duplicate alternatives") {
    CHECK_THROWS_AS(parse_llocs("a\t0\t1\t0.5\tb=0.2;b=0.1\n"), ParseError);
  }
  SUBCASE("missing field") {
    CHECK_THROWS_AS(parse_llocs("a\t0\t1\t0.5\n"), ParseError);
  }
  SUBCASE("unknown escape") {
    CHECK_THROWS_AS(parse_llocs("\\x\t0\t1\t0.5\t\n"), ParseError);
  }
  SUBCASE("invalid utf-8") {
    CHECK_THROWS_AS(parse_llocs("\xff\t0\t1\t0.5\t\n"), ParseError);
  }
}

TEST_CASE("unsorted alternatives are reordered on ingest") {
  const auto h = parse_llocs("a\t0\t1\t0.5\tb=0.1;c=0.3\n");
  REQUIRE(h.entries[0].alternatives.size() == 2);
  CHECK(h.entries[0].alternatives[0].ch == U'c');
}

TEST_CASE("writers drop alternatives under the storage floor") {
  const auto h = make_hypothesis({{U'a', 0, 1, 0.9, {{U'b', 0.05}, {U'c', 0.00005}}}});
  CHECK(write_llocs(h) == "a\t0\t1\t0.9\tb=0.05\n");
}

TEST_CASE("randomized round-trip") {
  Rng rng(20240611);
  for (int i = 0; i < 2000; ++i) {
    const LineHypothesis h = random_hypothesis(rng);
    validate_hypothesis(h);
    const LineHypothesis back = parse_llocs(write_llocs(h), "m");
    REQUIRE(back == h);
  }
}

TEST_CASE("validate_hypothesis") {
  LineHypothesis h = make_hypothesis({{U'a', 0, 1, 0.5, {}}, {U'b', 2, 3, 0.5, {}}});
  CHECK_NOTHROW(validate_hypothesis(h));
  h.text = U"ax";
  CHECK_THROWS_AS(validate_hypothesis(h), DataError);
  CHECK_NOTHROW(validate_hypothesis(make_text_hypothesis(U"abc")));
  CHECK_FALSE(make_text_hypothesis(U"abc").has_llocs());
}

TEST_CASE("load and save hypothesis files") {
  const auto dir = std::filesystem::temp_directory_path() / "ocrvote_llocs_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto h = make_hypothesis({{U'i', 120, 123, 0.8754, {{U'b', 0.0866}, {U'f', 0.0294}}},
                                  table_entry()},
                                 "M4");
  save_hypothesis(dir / "0001", h);
  CHECK(load_hypothesis(dir / "0001", "M4") == h);

  // .txt alone gives a text-only hypothesis
  std::filesystem::remove(dir / "0001.llocs");
  const auto plain = load_hypothesis(dir / "0001");
  CHECK(plain.text == U"ia");
  CHECK_FALSE(plain.has_llocs());

  CHECK_THROWS_AS(load_hypothesis(dir / "missing"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("utf8 decoding rejects malformed input") {
  CHECK(decode_utf8("ã") == U"ã");
  CHECK(encode_utf8(U"ſꝛ") == "ſꝛ");
  CHECK_THROWS_AS(decode_utf8("\xc0\xaf"), DataError);
  CHECK_THROWS_AS(decode_utf8("\xe2\x82"), DataError);
  CHECK_THROWS_AS(decode_utf8("\xed\xa0\x80"), DataError);
}
