///////////////////////////////////////////////////////////////////////
// File:        voting.cpp
// Description: Length vote and per-slot character selection.
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

#include "ocrvote/voting.hpp"

#include <algorithm>

#include "ocrvote/error.hpp"
#include "ocrvote/utf8.hpp"

namespace ocrvote {

void validate_config(const VoteConfig& cfg) {
  if (!(cfg.alt_threshold >= 0.0 && cfg.alt_threshold < 1.0)) {
    throw UsageError("alt_threshold must lie in [0, 1)");
  }
}

VoteMode parse_vote_mode(std::string_view name) {
  if (name == "majority") return VoteMode::kMajority;
  if (name == "confidence") return VoteMode::kConfidence;
  throw UsageError("unknown vote mode '" + std::string(name) + "'");
}

std::string_view to_string(VoteMode mode) {
  return mode == VoteMode::kMajority ? "majority" : "confidence";
}

std::size_t vote_length(std::span<const std::size_t> lengths) {
  if (lengths.empty()) throw UsageError("length vote over no inputs");
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t len : lengths) ++counts[len];
  // Ascending key order: the first maximum is the shortest.
  std::size_t best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [len, count] : counts) {
    if (count > best_count) {
      best = len;
      best_count = count;
    }
  }
  return best;
}

ConfidenceMap sum_candidate_confidences(std::span<const SlotVote> slot,
                                        const VoteConfig& cfg) {
  std::map<char32_t, std::vector<double>> contributions;
  for (const SlotVote& vote : slot) {
    contributions[vote.entry.ch].push_back(vote.entry.conf);
    if (cfg.rec_only) continue;
    for (const Alternative& alt : vote.entry.alternatives) {
      if (alt.conf > cfg.alt_threshold && alt.ch != vote.entry.ch) {
        contributions[alt.ch].push_back(alt.conf);
      }
    }
  }
  ConfidenceMap sums;
  for (auto& [ch, parts] : contributions) {
    std::sort(parts.begin(), parts.end());
    double total = 0.0;
    for (double p : parts) total += p;
    sums.emplace(ch, total);
  }
  return sums;
}

namespace {

// Highest score, then more top-1 supporters, then lowest code point.
char32_t pick(const std::map<char32_t, double>& score,
              const std::map<char32_t, std::size_t>& support) {
  char32_t best = 0;
  double best_score = -1.0;
  std::size_t best_support = 0;
  for (const auto& [ch, s] : score) {
    const auto it = support.find(ch);
    const std::size_t sup = it == support.end() ? 0 : it->second;
    if (s > best_score || (s == best_score && sup > best_support)) {
      best = ch;
      best_score = s;
      best_support = sup;
    }
  }
  return best;
}

LlocsEntry certain_entry(char32_t ch) {
  LlocsEntry e;
  e.ch = ch;
  e.conf = 1.0;
  return e;
}

}  // namespace

RegionVote vote_region(const Disagreement& region, const VoteConfig& cfg) {
  if (region.per_input.empty()) throw UsageError("region without inputs");
  RegionVote result;
  result.id = region.id;

  std::vector<std::size_t> lengths;
  lengths.reserve(region.per_input.size());
  for (const RegionInput& in : region.per_input) lengths.push_back(in.text.size());
  result.target_length = vote_length(lengths);
  for (std::size_t i = 0; i < region.per_input.size(); ++i) {
    if (lengths[i] == result.target_length) result.survivors.push_back(i);
  }

  for (std::size_t k = 0; k < result.target_length; ++k) {
    std::map<char32_t, std::size_t> support;
    for (std::size_t i : result.survivors) ++support[region.per_input[i].text[k]];

    std::map<char32_t, double> score;
    if (cfg.mode == VoteMode::kMajority) {
      for (const auto& [ch, n] : support) score[ch] = static_cast<double>(n);
    } else {
      std::vector<SlotVote> slot;
      slot.reserve(result.survivors.size());
      for (std::size_t i : result.survivors) {
        const RegionInput& in = region.per_input[i];
        slot.push_back({in.entries.size() == in.text.size()
                            ? in.entries[k]
                            : certain_entry(in.text[k]),
                        i});
      }
      ConfidenceMap sums = sum_candidate_confidences(slot, cfg);
      score.insert(sums.begin(), sums.end());
      result.slot_sums.push_back(std::move(sums));
    }
    result.chosen.push_back(pick(score, support));
  }
  return result;
}

VoteResult vote_line(std::span<const LineHypothesis> hyps, const VoteConfig& cfg) {
  validate_config(cfg);
  if (hyps.empty()) throw UsageError("vote_line needs at least one hypothesis");
  for (const LineHypothesis& h : hyps) validate_hypothesis(h);

  VoteResult result;
  if (cfg.mode == VoteMode::kConfidence) {
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      if (!hyps[i].has_llocs()) {
        const std::string& id = hyps[i].model_id;
        result.warnings.push_back(
            "missing llocs for input " + std::to_string(i + 1) +
            (id.empty() ? std::string() : " (" + id + ")") +
            "; treated as confidence 1.0 without alternatives");
      }
    }
  }
  if (hyps.size() == 1) {
    result.text = hyps.front().text;
    return result;
  }

  const AlignedSet set = align_many(hyps);
  const std::vector<Disagreement> regions = extract_disagreements(set, hyps);
  auto next = regions.begin();
  std::size_t c = 0;
  while (c < set.columns()) {
    if (next != regions.end() && next->col_begin == c) {
      RegionVote vote = vote_region(*next, cfg);
      result.text += vote.chosen;
      result.per_region.push_back(std::move(vote));
      c = next->col_end;
      ++next;
      continue;
    }
    result.text.push_back(set.rows[0][c]);
    ++c;
  }
  return result;
}

}  // namespace ocrvote
