///////////////////////////////////////////////////////////////////////
// File:        folds.hpp
// Description: Cross-fold allocation of ground-truth lines and per-fold
//              model selection.
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

#ifndef OCRVOTE_FOLDS_HPP
#define OCRVOTE_FOLDS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ocrvote {

struct FoldSplit {
  std::vector<std::size_t> train;  // ascending line ids
  std::vector<std::size_t> test;   // ascending line ids
};

struct FoldPlan {
  std::size_t n_folds = 0;
  std::vector<std::size_t> assignment;  // line id -> fold id (0-based)
  std::vector<FoldSplit> splits;        // one per fold
  std::size_t train_extra = 0;

  std::vector<std::size_t> fold_sizes() const;
};

/// Splits n_lines into n_folds blocks whose sizes differ by at most one;
/// earlier folds take the remainder. Without a seed the blocks follow input
/// order; with one, a seeded permutation is applied first. Split f tests on
/// fold f minus its `train_extra` lowest ids, which move to training.
FoldPlan make_fold_plan(std::size_t n_lines, std::size_t n_folds,
                        std::optional<std::uint64_t> shuffle_seed = std::nullopt,
                        std::size_t train_extra = 0);

/// "line_id<TAB>fold_id" per line, both 0-based.
std::string write_fold_plan(const FoldPlan& plan);

/// Reads write_fold_plan() output; splits are rebuilt with train_extra 0.
FoldPlan parse_fold_plan(std::string_view text);

/// Index of the model with the lowest corpus CER on the test lines; the
/// lowest index wins ties.
std::size_t select_best_model(
    std::span<const std::u32string> test_gt,
    std::span<const std::vector<std::u32string>> per_model_test_preds);

}  // namespace ocrvote

#endif  // OCRVOTE_FOLDS_HPP
