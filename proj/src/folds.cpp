///////////////////////////////////////////////////////////////////////
// File:        folds.cpp
// Description: Cross-fold allocation and model selection.
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

#include "ocrvote/folds.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "ocrvote/error.hpp"
#include "ocrvote/evaluation.hpp"
#include "ocrvote/random.hpp"

namespace ocrvote {
namespace {

void build_splits(FoldPlan& plan) {
  plan.splits.assign(plan.n_folds, {});
  for (std::size_t f = 0; f < plan.n_folds; ++f) {
    FoldSplit& split = plan.splits[f];
    std::size_t moved = 0;
    for (std::size_t line = 0; line < plan.assignment.size(); ++line) {
      if (plan.assignment[line] != f) {
        split.train.push_back(line);
      } else if (moved < plan.train_extra) {
        split.train.push_back(line);
        ++moved;
      } else {
        split.test.push_back(line);
      }
    }
  }
}

}  // namespace

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(n_folds, 0);
  for (std::size_t f : assignment) ++sizes[f];
  return sizes;
}

FoldPlan make_fold_plan(std::size_t n_lines, std::size_t n_folds,
                        std::optional<std::uint64_t> shuffle_seed,
                        std::size_t train_extra) {
  if (n_folds < 2) throw UsageError("need at least 2 folds");
  if (n_lines < n_folds) throw UsageError("fewer lines than folds");
  const std::size_t smallest = n_lines / n_folds;
  if (train_extra >= smallest) {
    throw UsageError("train_extra must be smaller than the smallest fold (" +
                     std::to_string(smallest) + ")");
  }

  std::vector<std::size_t> order(n_lines);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    for (std::size_t i = n_lines - 1; i > 0; --i) {
      std::swap(order[i], order[uniform_below(rng, i + 1)]);
    }
  }

  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.train_extra = train_extra;
  plan.assignment.resize(n_lines);
  const std::size_t remainder = n_lines % n_folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < n_folds; ++f) {
    const std::size_t size = smallest + (f < remainder ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) plan.assignment[order[pos++]] = f;
  }
  build_splits(plan);
  return plan;
}

std::string write_fold_plan(const FoldPlan& plan) {
  std::string out;
  for (std::size_t line = 0; line < plan.assignment.size(); ++line) {
    out += std::to_string(line) + "\t" + std::to_string(plan.assignment[line]) +
           "\n";
  }
  return out;
}

FoldPlan parse_fold_plan(std::string_view text) {
  FoldPlan plan;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  std::size_t max_fold = 0;
  while (begin < text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view row = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    if (row.empty()) continue;
    const std::size_t tab = row.find('\t');
    std::size_t id = 0;
    std::size_t fold = 0;
    const auto parse = [&](std::string_view s, std::size_t& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc() && p == s.data() + s.size() && !s.empty();
    };
    if (tab == std::string_view::npos || !parse(row.substr(0, tab), id) ||
        !parse(row.substr(tab + 1), fold)) {
      throw ParseError(line_no, "expected 'line_id<TAB>fold_id'");
    }
    if (id != plan.assignment.size()) {
      throw ParseError(line_no, "line ids must be consecutive from 0");
    }
    plan.assignment.push_back(fold);
    max_fold = std::max(max_fold, fold);
  }
  plan.n_folds = plan.assignment.empty() ? 0 : max_fold + 1;
  build_splits(plan);
  return plan;
}

std::size_t select_best_model(
    std::span<const std::u32string> test_gt,
    std::span<const std::vector<std::u32string>> per_model_test_preds) {
  if (per_model_test_preds.empty()) throw UsageError("no models to select from");
  std::size_t best = 0;
  std::size_t best_errors = 0;
  for (std::size_t m = 0; m < per_model_test_preds.size(); ++m) {
    const std::size_t errors =
        corpus_cer(test_gt, per_model_test_preds[m]).total_errors;
    if (m == 0 || errors < best_errors) {
      best = m;
      best_errors = errors;
    }
  }
  return best;
}

}  // namespace ocrvote
