///////////////////////////////////////////////////////////////////////
// File:        pipeline.hpp
// Description: End-to-end workflow: fold planning, per-fold model
//              (synthetic or external), voting and evaluation.
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

#ifndef OCRVOTE_PIPELINE_HPP
#define OCRVOTE_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ocrvote/config.hpp"
#include "ocrvote/evaluation.hpp"
#include "ocrvote/folds.hpp"
#include "ocrvote/llocs.hpp"
#include "ocrvote/synth.hpp"
#include "ocrvote/voting.hpp"

namespace ocrvote {

/// Every fold "trains" candidates_per_fold synthetic models whose error
/// rates are the fold's ErrorModel scaled by a factor drawn from
/// [1 - candidate_jitter, 1 + candidate_jitter]; the candidate with the
/// lowest CER on the fold's test lines recognizes the evaluation set.
struct SynthSource {
  // One model shared by all folds, or one per fold.
  std::vector<ErrorModel> fold_models{ErrorModel{}};
  std::size_t candidates_per_fold = 3;
  double candidate_jitter = 0.3;
};

/// The command template is run once per fold through the shell with
/// {fold}, {train}, {test}, {eval} and {out} substituted. {train}, {test}
/// and {eval} name GT files with one line per row; the command must leave
/// NNNN.txt (and optionally NNNN.llocs) in {out} for every evaluation line,
/// numbered from 0001.
struct ExternalSource {
  std::string command_template;
  std::size_t max_parallel = 2;
};

struct PipelineConfig {
  std::size_t n_folds = 5;
  std::size_t n_lines = 150;     // GT pool split into folds
  std::size_t eval_lines = 500;  // held-out lines; ignored with eval_file
  std::size_t train_extra = 0;
  bool shuffle = false;          // seeded by base_seed
  VoteConfig vote;
  std::uint64_t base_seed = 1;
  // Empty paths mean generated pseudo-text.
  std::filesystem::path gt_file;
  std::filesystem::path eval_file;
  std::filesystem::path output_dir;  // empty: nothing written
  std::size_t threads = 0;           // 0: hardware concurrency (max 8)
  SynthSource synth;
  std::optional<ExternalSource> external;
};

/// Builds a config from key-value settings. Relative paths resolve against
/// `base_dir`. Throws UsageError / DataError on bad values.
PipelineConfig pipeline_config_from(const KeyValueConfig& kv,
                                    const std::filesystem::path& base_dir = {});

/// Throws UsageError if the configuration is inconsistent.
void validate_pipeline_config(const PipelineConfig& cfg);

struct FoldSelection {
  std::size_t fold = 0;
  std::size_t chosen = 0;              // candidate index
  std::vector<double> candidate_cers;  // on the fold's test lines
};

struct PipelineResult {
  FoldPlan plan;
  std::vector<FoldSelection> selections;  // synthetic source only
  std::vector<std::u32string> eval_gt;
  // hypotheses[f][l]: fold f's model on evaluation line l.
  std::vector<std::vector<LineHypothesis>> hypotheses;
  // Voted lines per system, in report order (configured mode first).
  std::vector<NamedCorpus> voted;
  EnsembleReport report;
  std::vector<std::filesystem::path> written;
};

/// Runs the workflow; deterministic given base_seed. Files written to
/// output_dir: fold_plan.tsv, report.txt, report.csv, voted_<system>.txt
/// and predictions/M<f>.txt.
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// Votes every line across folds with bounded parallelism; results keep
/// line order.
std::vector<VoteResult> vote_corpus(
    const std::vector<std::vector<LineHypothesis>>& per_model,
    const VoteConfig& cfg, std::size_t threads);

/// Reads one line per row; a trailing newline does not add a line.
std::vector<std::u32string> read_lines(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path,
                 const std::vector<std::u32string>& lines);

}  // namespace ocrvote

#endif  // OCRVOTE_PIPELINE_HPP
