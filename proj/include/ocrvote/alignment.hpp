///////////////////////////////////////////////////////////////////////
// File:        alignment.hpp
// Description: Column alignment of N line hypotheses and extraction of
//              the regions where they disagree.
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

#ifndef OCRVOTE_ALIGNMENT_HPP
#define OCRVOTE_ALIGNMENT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ocrvote/llocs.hpp"

namespace ocrvote {

/// Padding symbol; lies outside the Unicode range so it never collides
/// with a recognized glyph.
inline constexpr char32_t kGap = 0x110000;

/// N gap-padded rows of equal width.
struct AlignedSet {
  std::vector<std::u32string> rows;
  // col_to_index[r][c] is the character index of rows[r][c] in input r, or
  // nullopt where that row holds kGap.
  std::vector<std::vector<std::optional<std::size_t>>> col_to_index;

  std::size_t columns() const { return rows.empty() ? 0 : rows.front().size(); }
  bool unanimous(std::size_t column) const;
};

/// Minimal unit-cost alignment of two strings. Trace-back runs from the end
/// and prefers match, then substitution, then deletion (a's character
/// against a gap), then insertion.
AlignedSet align_pair(std::u32string_view a, std::u32string_view b);

/// Hypothesis chosen as alignment reference: least summed edit distance to
/// all others; ties go to the shorter text, then the lexicographically
/// smaller one, then the lower index.
std::size_t choose_pivot(std::span<const std::u32string> texts);

/// Star alignment around choose_pivot(). Every other text is aligned to the
/// pivot with align_pair; insertions against the pivot become shared
/// columns, left-justified within their slot.
AlignedSet align_many(std::span<const std::u32string> texts);
AlignedSet align_many(std::span<const LineHypothesis> hyps);

/// One input's contribution to a disagreement region.
struct RegionInput {
  std::u32string text;
  // Matching llocs slice; empty when the hypothesis has no llocs.
  std::vector<LlocsEntry> entries;
  std::size_t first_index = 0;
  bool has_llocs = false;
};

/// Maximal run of non-unanimous columns [col_begin, col_end).
struct Disagreement {
  int id = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;
  std::vector<RegionInput> per_input;
};

/// Regions ordered left to right with ids 1, 2, ...; `set` must come from
/// align_many(hyps).
std::vector<Disagreement> extract_disagreements(
    const AlignedSet& set, std::span<const LineHypothesis> hyps);

/// The aligned line alone, e.g. "i{1}de mari{2}n namen".
std::string render_aligned_line(const AlignedSet& set,
                                std::span<const Disagreement> regions);

/// Full listing:
///
///   Aligned: i{1}de mari{2}n namen
///   ---------------------------------------
///   {1}: M1{ni}, M2{n}, M3{n}, M4{a}, M5{n}
///   {2}: M1{c}, M2{c}, M3{e}, M4{e}, M5{c}
///
/// The rule is as wide as the widest line. Without regions only the first
/// line is emitted.
std::string render_alignment(const AlignedSet& set,
                             std::span<const Disagreement> regions);

}  // namespace ocrvote

#endif  // OCRVOTE_ALIGNMENT_HPP
