///////////////////////////////////////////////////////////////////////
// File:        voting.hpp
// Description: Resolves disagreement regions by a length vote followed by
//              per-slot majority or confidence-sum selection.
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

#ifndef OCRVOTE_VOTING_HPP
#define OCRVOTE_VOTING_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ocrvote/alignment.hpp"
#include "ocrvote/llocs.hpp"

namespace ocrvote {

enum class VoteMode { kMajority, kConfidence };

struct VoteConfig {
  VoteMode mode = VoteMode::kConfidence;
  // Alternatives count only when strictly above this confidence.
  double alt_threshold = 0.01;
  // Confidence mode sums top-1 confidences only.
  bool rec_only = false;
};

/// Throws UsageError unless 0 <= alt_threshold < 1.
void validate_config(const VoteConfig& cfg);

/// "majority" / "confidence"; throws UsageError otherwise.
VoteMode parse_vote_mode(std::string_view name);
std::string_view to_string(VoteMode mode);

/// Modal length; ties resolve to the shortest. Requires a non-empty input.
std::size_t vote_length(std::span<const std::size_t> lengths);

struct SlotVote {
  LlocsEntry entry;
  std::size_t input = 0;
};

using ConfidenceMap = std::map<char32_t, double>;

/// Each entry adds its confidence to its own character and, unless
/// rec_only, each alternative above alt_threshold to that character.
/// Sums are formed in ascending order of contribution so the result does
/// not depend on input order.
ConfidenceMap sum_candidate_confidences(std::span<const SlotVote> slot,
                                        const VoteConfig& cfg);

struct RegionVote {
  int id = 0;
  std::u32string chosen;
  std::size_t target_length = 0;
  // Inputs whose region text had target_length characters.
  std::vector<std::size_t> survivors;
  // Confidence mode only: one map per slot.
  std::vector<ConfidenceMap> slot_sums;
};

/// Length vote, then per-slot choice among the survivors. Slot k takes each
/// survivor's k-th character. Ties on score go to the character recognized
/// by more survivors, then to the lowest code point. In confidence mode an
/// input without llocs counts as certain top-1 output.
RegionVote vote_region(const Disagreement& region, const VoteConfig& cfg);

struct VoteResult {
  std::u32string text;
  std::vector<RegionVote> per_region;
  std::vector<std::string> warnings;
};

/// Aligns, resolves every region and splices the chosen strings between
/// the unanimous columns. A single hypothesis is returned unchanged.
VoteResult vote_line(std::span<const LineHypothesis> hyps, const VoteConfig& cfg);

}  // namespace ocrvote

#endif  // OCRVOTE_VOTING_HPP
