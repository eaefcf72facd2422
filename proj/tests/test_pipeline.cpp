// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ocrvote/config.hpp"
#include "ocrvote/error.hpp"
#include "ocrvote/pipeline.hpp"

using namespace ocrvote;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ocrvote_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.n_lines = 50;
  cfg.eval_lines = 60;
  cfg.base_seed = 11;
  ErrorModel m;
  m.sub_rate = 0.03;
  cfg.synth.fold_models = {m};
  return cfg;
}

}  // namespace

TEST_CASE("key-value config parsing") {
  const auto kv = KeyValueConfig::parse(
      "# comment\n"
      "n_folds = 5\n"
      "\n"
      "mode=majority\n"
      "alphabet = \" ab \"\n"
      "flag = yes\n");
  CHECK(kv.get_int("n_folds", 0) == 5);
  CHECK(kv.get_string("mode", "") == "majority");
  CHECK(kv.get_string("alphabet", "") == " ab ");
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_double("missing", 0.5) == 0.5);
  CHECK_THROWS_AS(kv.get_int("mode", 0), DataError);
  CHECK_THROWS_AS(KeyValueConfig::parse("just words\n"), ParseError);
}

TEST_CASE("pipeline config from key-values") {
  const auto kv = KeyValueConfig::parse(
      "n_folds = 4\n"
      "n_lines = 40\n"
      "eval_lines = 20\n"
      "mode = majority\n"
      "alt_threshold = 0.02\n"
      "base_seed = 9\n"
      "model.sub_rate = 0.02\n"
      "model.3.sub_rate = 0.05\n");
  const PipelineConfig cfg = pipeline_config_from(kv);
  CHECK(cfg.n_folds == 4);
  CHECK(cfg.vote.mode == VoteMode::kMajority);
  CHECK(cfg.vote.alt_threshold == 0.02);
  REQUIRE(cfg.synth.fold_models.size() == 4);
  CHECK(cfg.synth.fold_models[0].sub_rate == 0.02);
  CHECK(cfg.synth.fold_models[2].sub_rate == 0.05);

  CHECK_THROWS_AS(pipeline_config_from(KeyValueConfig::parse("n_folds = 1\n")), UsageError);
  CHECK_THROWS_AS(pipeline_config_from(KeyValueConfig::parse("gt_file = /nonexistent/x\n")),
                  UsageError);
  CHECK_THROWS_AS(pipeline_config_from(KeyValueConfig::parse("mode = isri\n")), UsageError);
}

TEST_CASE("zero-error pipeline votes back to GT") {
  PipelineConfig cfg = small_config();
  cfg.synth.fold_models = {ErrorModel{}};
  const PipelineResult r = run_pipeline(cfg);
  REQUIRE(r.report.voted.size() == 2);
  CHECK(r.report.voted[0].cer.cer == 0.0);
  CHECK(r.report.voted[1].cer.cer == 0.0);
  CHECK(r.voted[0].lines == r.eval_gt);
}

TEST_CASE("pipeline output equals direct per-line voting") {
  const PipelineConfig cfg = small_config();
  const PipelineResult r = run_pipeline(cfg);
  REQUIRE(r.hypotheses.size() == 5);
  REQUIRE(r.selections.size() == 5);
  CHECK(r.voted[0].id == "confidence");
  CHECK(r.voted[1].id == "majority");
  for (std::size_t l = 0; l < r.eval_gt.size(); ++l) {
    std::vector<LineHypothesis> hyps;
    for (const auto& m : r.hypotheses) hyps.push_back(m[l]);
    REQUIRE(vote_line(hyps, cfg.vote).text == r.voted[0].lines[l]);
  }
  // Report totals equal recomputation from the per-line records.
  for (const auto& row : r.report.voted) {
    std::size_t errors = 0, chars = 0;
    for (const auto& line : row.cer.per_line) {
      errors += line.errors;
      chars += line.gt_chars;
    }
    CHECK(errors == row.cer.total_errors);
    CHECK(chars == row.cer.total_chars);
  }
  // Selection picked the lowest test CER in every fold.
  for (const auto& sel : r.selections) {
    for (double c : sel.candidate_cers) CHECK(sel.candidate_cers[sel.chosen] <= c);
  }
}

TEST_CASE("thread count does not change results") {
  PipelineConfig a = small_config();
  a.threads = 1;
  PipelineConfig b = small_config();
  b.threads = 6;
  CHECK(run_pipeline(a).voted[0].lines == run_pipeline(b).voted[0].lines);
}

TEST_CASE("pipeline writes identical files for identical seeds") {
  PipelineConfig cfg = small_config();
  cfg.output_dir = scratch("det_a");
  const auto first = run_pipeline(cfg);
  cfg.output_dir = scratch("det_b");
  const auto second = run_pipeline(cfg);
  REQUIRE(first.written.size() == second.written.size());
  for (std::size_t i = 0; i < first.written.size(); ++i) {
    CHECK(first.written[i].filename() == second.written[i].filename());
    CHECK(slurp(first.written[i]) == slurp(second.written[i]));
  }
  CHECK(fs::exists(cfg.output_dir / "report.csv"));
  CHECK(fs::exists(cfg.output_dir / "voted_confidence.txt"));
  CHECK(fs::exists(cfg.output_dir / "predictions" / "M3.txt"));
  const std::string csv = slurp(cfg.output_dir / "report.csv");
  CHECK(csv.rfind("model_id,cer,", 0) == 0);
}

TEST_CASE("gt files feed the pipeline") {
  const fs::path dir = scratch("gtfile");
  {
    std::ofstream gt(dir / "gt.txt");
    for (int i = 0; i < 30; ++i) gt << "linea numero " << i << " de prueba\n";
  }
  PipelineConfig cfg = small_config();
  cfg.n_lines = 20;
  cfg.gt_file = dir / "gt.txt";
  cfg.eval_file = dir / "gt.txt";
  const auto r = run_pipeline(cfg);
  CHECK(r.eval_gt.size() == 30);
  cfg.n_lines = 31;
  CHECK_THROWS_AS(run_pipeline(cfg), DataError);
}

TEST_CASE("external trainer command") {
  const fs::path dir = scratch("external");
  PipelineConfig cfg;
  cfg.n_folds = 3;
  cfg.n_lines = 9;
  cfg.eval_lines = 12;
  cfg.output_dir = dir;
  cfg.vote.mode = VoteMode::kConfidence;
  ExternalSource ext;
  // A "recognizer" that echoes the evaluation GT, dropping the first
  // character of line 1 in fold 2.
  ext.command_template =
      "i=0; while IFS= read -r l; do i=$((i+1)); "
      "if [ {fold} = 2 ] && [ $i = 1 ]; then l=${l#?}; fi; "
      "printf '%s\\n' \"$l\" > {out}/$(printf %04d $i).txt; done < {eval}";
  ext.max_parallel = 2;
  cfg.external = ext;

  const auto r = run_pipeline(cfg);
  REQUIRE(r.hypotheses.size() == 3);
  CHECK(r.hypotheses[1][0].text.size() + 1 == r.eval_gt[0].size());
  CHECK(r.voted[0].lines == r.eval_gt);
  CHECK(r.report.models[1].cer.total_errors == 1);
  // Text-only predictions produce missing-llocs warnings in confidence mode.
  CHECK(r.report.warnings.size() == 36);
  CHECK(fs::exists(dir / "fold_2" / "train.txt"));
  CHECK(slurp(dir / "fold_1" / "test.txt").size() > 0);

  cfg.external->command_template = "exit 7";
  try {
    run_pipeline(cfg);
    FAIL("expected ExternalCommandError");
  } catch (const ExternalCommandError& e) {
    CHECK(e.status() == 7);
  }
}
