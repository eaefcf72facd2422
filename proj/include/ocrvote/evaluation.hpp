///////////////////////////////////////////////////////////////////////
// File:        evaluation.hpp
// Description: Edit distance, character error rates, improvement rates
//              and chi-square significance of error-count differences.
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

#ifndef OCRVOTE_EVALUATION_HPP
#define OCRVOTE_EVALUATION_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ocrvote {

/// Levenshtein distance, unit costs.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// edit_distance(gt, pred) / |gt|; throws DataError("undefined CER") for an
/// empty gt.
double compute_cer(std::u32string_view gt, std::u32string_view pred);

struct LineErrors {
  std::size_t errors = 0;
  std::size_t gt_chars = 0;
};

struct CerReport {
  std::vector<LineErrors> per_line;
  std::size_t total_errors = 0;
  std::size_t total_chars = 0;
  double cer = 0.0;
};

/// Micro-averaged CER: summed errors over summed GT characters.
CerReport corpus_cer(std::span<const std::u32string> gt_lines,
                     std::span<const std::u32string> pred_lines);

/// (base - voted) / base; throws UsageError when base_cer <= 0.
double improvement_rate(double base_cer, double voted_cer);

struct SignificanceResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-square on the 2x2 table (errors, correct) x (a, b), one
/// degree of freedom, no continuity correction; p = erfc(sqrt(x / 2)).
/// Throws UsageError if a group is empty or err > n.
SignificanceResult chi_square_errors(std::size_t err_a, std::size_t n_a,
                                     std::size_t err_b, std::size_t n_b);

struct NamedCorpus {
  std::string id;
  std::vector<std::u32string> lines;
};

struct ModelRow {
  std::string id;
  CerReport cer;
  // First voted system against this model's counts.
  std::optional<SignificanceResult> vs_voted;
};

struct VotedRow {
  std::string id;
  CerReport cer;
  std::optional<double> improvement_best;
  std::optional<double> improvement_avg;
  std::optional<double> improvement_worst;
  // Against the best single model and against the rounded mean model
  // error count over the same characters.
  SignificanceResult vs_best;
  SignificanceResult vs_average;
};

struct EnsembleReport {
  std::vector<ModelRow> models;
  std::vector<VotedRow> voted;
  double best_cer = 0.0;
  double average_cer = 0.0;
  double worst_cer = 0.0;
  std::size_t average_errors = 0;
  std::size_t evaluated_chars = 0;
  std::vector<std::string> warnings;
};

/// Per-model and voted CERs with improvements over the min / mean / max
/// model CER. Improvements are nullopt when the base CER is zero.
EnsembleReport ensemble_report(std::span<const std::u32string> gt,
                               std::span<const NamedCorpus> per_model_preds,
                               std::span<const NamedCorpus> voted_preds);

/// Human-readable table, UTF-8.
std::string format_report_table(const EnsembleReport& report);

/// Columns: model_id,cer,improvement_best,improvement_avg,
/// improvement_worst,chi2,p. Model rows leave the improvement columns
/// empty; their chi2/p compare the first voted system with that model.
std::string format_report_csv(const EnsembleReport& report);

}  // namespace ocrvote

#endif  // OCRVOTE_EVALUATION_HPP
