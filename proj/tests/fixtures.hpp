// Worked-example fixtures shared by the unit and acceptance suites.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OCRVOTE_TESTS_FIXTURES_HPP
#define OCRVOTE_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "ocrvote/alignment.hpp"
#include "ocrvote/llocs.hpp"
#include "ocrvote/voting.hpp"

namespace fixture {

inline const std::u32string kGroundTruth = U"inde marien namen";

// Five model outputs for a line with a degraded 'e'.
inline std::vector<std::u32string> five_models() {
  return {U"inide maricn namen", U"inde maricn namen", U"inde marien namen",
          U"iade marien namen", U"inde maricn namen"};
}

// Recognized character plus its one listed alternative at the c/e position.
inline std::vector<ocrvote::LlocsEntry> ce_entries() {
  using ocrvote::LlocsEntry;
  return {
      LlocsEntry{U'c', 0, 0, 0.6683, {{U'e', 0.3840}}},
      LlocsEntry{U'c', 0, 0, 0.9327, {{U'e', 0.1977}}},
      LlocsEntry{U'e', 0, 0, 0.9991, {}},
      LlocsEntry{U'e', 0, 0, 0.9802, {{U'c', 0.0756}}},
      LlocsEntry{U'c', 0, 0, 0.9031, {{U'e', 0.5007}}},
  };
}

inline ocrvote::Disagreement ce_region() {
  ocrvote::Disagreement region;
  region.id = 2;
  for (const auto& e : ce_entries()) {
    ocrvote::RegionInput in;
    in.text = std::u32string(1, e.ch);
    in.entries = {e};
    in.has_llocs = true;
    region.per_input.push_back(in);
  }
  return region;
}

// The five hypotheses with llocs: 0.99 everywhere except the c/e position
// (from ce_entries) and M4's 'a' which keeps 'n' as a strong alternative.
inline std::vector<ocrvote::LineHypothesis> five_hypotheses_with_llocs() {
  const auto texts = five_models();
  const auto ce = ce_entries();
  std::vector<ocrvote::LineHypothesis> out;
  for (std::size_t m = 0; m < texts.size(); ++m) {
    std::vector<ocrvote::LlocsEntry> entries;
    const std::size_t ce_pos = texts[m].find(U"n nam") - 1;
    for (std::size_t i = 0; i < texts[m].size(); ++i) {
      ocrvote::LlocsEntry e{texts[m][i], static_cast<int>(i * 6),
                            static_cast<int>(i * 6 + 4), 0.99, {}};
      if (i == ce_pos) {
        e.conf = ce[m].conf;
        e.alternatives = ce[m].alternatives;
      }
      if (m == 3 && i == 1) {
        e.conf = 0.9665;
        e.alternatives = {{U'n', 0.4578}, {U'r', 0.2365}, {U'm', 0.0924}, {U'k', 0.0832}};
      }
      entries.push_back(e);
    }
    out.push_back(ocrvote::make_hypothesis(entries, "M" + std::to_string(m + 1)));
  }
  return out;
}

inline std::vector<ocrvote::LineHypothesis> text_hypotheses(
    const std::vector<std::u32string>& texts) {
  std::vector<ocrvote::LineHypothesis> out;
  for (const auto& t : texts) out.push_back(ocrvote::make_text_hypothesis(t));
  return out;
}

}  // namespace fixture

#endif  // OCRVOTE_TESTS_FIXTURES_HPP
