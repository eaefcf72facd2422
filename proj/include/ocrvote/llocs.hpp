///////////////////////////////////////////////////////////////////////
// File:        llocs.hpp
// Description: Extended llocs records: per-character recognition output
//              with pixel span, confidence and alternative characters.
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
///////////////////////////////////////////////////////////////////////

#ifndef OCRVOTE_LLOCS_HPP
#define OCRVOTE_LLOCS_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ocrvote {

/// Confidences are fractions in (0, 1], never percentages.
struct Alternative {
  char32_t ch = 0;
  double conf = 0.0;

  friend bool operator==(const Alternative&, const Alternative&) = default;
};

struct LlocsEntry {
  char32_t ch = 0;
  int x_start = 0;
  int x_end = 0;
  double conf = 1.0;
  // Sorted by descending conf; never contains `ch` itself.
  std::vector<Alternative> alternatives;

  friend bool operator==(const LlocsEntry&, const LlocsEntry&) = default;
};

/// One model's output for one line.
///
/// A hypothesis either carries llocs (entries.size() == text.size() and the
/// entry characters spell the text) or is text-only (entries empty). Voting
/// treats a text-only hypothesis as certain top-1 output with no
/// alternatives.
struct LineHypothesis {
  std::u32string text;
  std::vector<LlocsEntry> entries;
  std::string model_id;

  bool has_llocs() const { return !entries.empty() || text.empty(); }

  friend bool operator==(const LineHypothesis&, const LineHypothesis&) = default;
};

/// Writers drop alternatives below this confidence.
inline constexpr double kAlternativeStorageFloor = 0.0001;

/// Builds a hypothesis from its entries; text is their concatenation.
LineHypothesis make_hypothesis(std::vector<LlocsEntry> entries,
                               std::string model_id = {});

/// Text-only hypothesis (no llocs).
LineHypothesis make_text_hypothesis(std::u32string text,
                                    std::string model_id = {});

/// Throws DataError if `entry` breaks an LlocsEntry invariant.
void validate_entry(const LlocsEntry& entry);

/// Throws DataError if `hyp` breaks a LineHypothesis invariant.
void validate_hypothesis(const LineHypothesis& hyp);

/// Parses one extended llocs document:
///
///   <char> TAB <x_start> TAB <x_end> TAB <conf> TAB <alts>
///
/// with `<alts>` a possibly empty `;`-joined list of `<char>=<conf>`. The
/// characters tab, backslash, `;`, `=` and newline are written as `\t`,
/// `\\`, `\;`, `\=` and `\n`. Blank lines are ignored. Alternatives are
/// re-sorted by descending confidence. Throws ParseError naming the
/// offending line.
LineHypothesis parse_llocs(std::string_view raw, std::string model_id = {});

/// Inverse of parse_llocs. Confidences use at most six decimals with
/// trailing zeros trimmed; alternatives below kAlternativeStorageFloor are
/// omitted.
std::string write_llocs(const LineHypothesis& hyp);

/// Renders a confidence the way write_llocs does ("0.9665", "1").
std::string format_confidence(double conf);

/// Reads `<stem>.txt` (first line) and `<stem>.llocs` if it exists. When an
/// llocs file is present its text must match the .txt line when both exist.
LineHypothesis load_hypothesis(const std::filesystem::path& stem,
                               std::string model_id = {});

/// Writes `<stem>.txt` and `<stem>.llocs` (the latter only if hyp has llocs
/// and a non-empty text).
void save_hypothesis(const std::filesystem::path& stem,
                     const LineHypothesis& hyp);

}  // namespace ocrvote

#endif  // OCRVOTE_LLOCS_HPP
