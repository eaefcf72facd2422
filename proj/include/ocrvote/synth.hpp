///////////////////////////////////////////////////////////////////////
// File:        synth.hpp
// Description: Synthetic OCR channel: corrupts ground-truth lines and
//              emits text plus extended llocs, standing in for trained
//              recognition models.
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

#ifndef OCRVOTE_SYNTH_HPP
#define OCRVOTE_SYNTH_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ocrvote/config.hpp"
#include "ocrvote/llocs.hpp"

namespace ocrvote {

inline constexpr char32_t kDefaultAlphabet[] =
    U"abcdefghijklmnopqrstuvwxyz ";

/// Per-character corruption channel.
///
/// Each GT character is deleted with del_rate, substituted with sub_rate
/// (drawn from `confusions` when the character has an entry, uniformly from
/// the alphabet otherwise) and kept otherwise; after every position a random
/// alphabet character is inserted with ins_rate.
///
/// Confidences: a kept character gets conf_correct jittered uniformly by
/// +-conf_noise. A substituted character gets a top-1 confidence in
/// [0.5, 0.9]; with probability 1 - conf_noise the true character receives
/// most of the remaining mass as an alternative. Inserted characters get a
/// top-1 confidence in [0.3, 0.7]. Top-1 and alternatives always sum to 1.
struct ErrorModel {
  double sub_rate = 0.0;
  double ins_rate = 0.0;
  double del_rate = 0.0;
  std::map<char32_t, std::vector<std::pair<char32_t, double>>> confusions;
  double conf_correct = 0.98;
  double conf_noise = 0.02;
  std::u32string alphabet = kDefaultAlphabet;
};

/// Throws UsageError for negative rates, rates summing to >= 1, confusion
/// targets outside the alphabet or confidences outside (0, 1].
void validate_model(const ErrorModel& model);

/// Reads sub_rate, ins_rate, del_rate, conf_correct, conf_noise, alphabet
/// and `confusion.<c> = <x>:<w>,<y>:<w>` under `prefix` (e.g. "model.1.");
/// missing keys fall back to `defaults`.
ErrorModel read_error_model(const KeyValueConfig& cfg, const std::string& prefix,
                            const ErrorModel& defaults = {});

/// Deterministic in (gt, model, seed). Pixel spans are consecutive boxes of
/// kSynthBoxWidth pixels.
inline constexpr int kSynthBoxWidth = 10;
LineHypothesis simulate_model_line(std::u32string_view gt, const ErrorModel& model,
                                   std::uint64_t seed, std::string model_id = {});

/// result[i][l] is model i's hypothesis for line l, seeded from
/// (base_seed, i, l). Model ids are "M1", "M2", ...
std::vector<std::vector<LineHypothesis>> simulate_ensemble(
    std::span<const std::u32string> gt_lines, std::span<const ErrorModel> models,
    std::uint64_t base_seed);

/// Pseudo-text lines of lowercase words over kDefaultAlphabet, roughly
/// 35-60 characters each.
std::vector<std::u32string> generate_text_lines(std::size_t count,
                                                std::uint64_t seed);

}  // namespace ocrvote

#endif  // OCRVOTE_SYNTH_HPP
