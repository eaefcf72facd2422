///////////////////////////////////////////////////////////////////////
// File:        ocrvote_cli.cpp
// Description: Command line front end: folds, align, vote, eval,
//              simulate and pipeline.
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

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ocrvote/alignment.hpp"
#include "ocrvote/config.hpp"
#include "ocrvote/error.hpp"
#include "ocrvote/evaluation.hpp"
#include "ocrvote/folds.hpp"
#include "ocrvote/llocs.hpp"
#include "ocrvote/pipeline.hpp"
#include "ocrvote/synth.hpp"
#include "ocrvote/utf8.hpp"
#include "ocrvote/voting.hpp"

namespace fs = std::filesystem;
using namespace ocrvote;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kExternal = 3 };

// "a/0001.txt", "a/0001.llocs" and "a/0001" all name the stem "a/0001".
fs::path to_stem(const fs::path& p) {
  const auto ext = p.extension();
  if (ext == ".txt" || ext == ".llocs") return p.parent_path() / p.stem();
  return p;
}

std::vector<std::string> stems_in(const fs::path& dir) {
  std::set<std::string> stems;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".txt" || ext == ".llocs")) {
      stems.insert(e.path().stem().string());
    }
  }
  return {stems.begin(), stems.end()};
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

std::vector<LineHypothesis> load_all(const std::vector<std::string>& inputs) {
  std::vector<LineHypothesis> hyps;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    hyps.push_back(load_hypothesis(to_stem(inputs[i]), "M" + std::to_string(i + 1)));
  }
  return hyps;
}

struct FoldsArgs {
  std::size_t lines = 0;
  std::size_t folds = 5;
  std::optional<std::uint64_t> seed;
  std::size_t train_extra = 0;
  std::string output;
};

int run_folds(const FoldsArgs& a) {
  const FoldPlan plan = make_fold_plan(a.lines, a.folds, a.seed, a.train_extra);
  write_output(a.output, write_fold_plan(plan));
  for (std::size_t f = 0; f < plan.splits.size(); ++f) {
    std::cerr << "fold " << f + 1 << ": train " << plan.splits[f].train.size()
              << " / test " << plan.splits[f].test.size() << "\n";
  }
  return kOk;
}

int run_align(const std::vector<std::string>& inputs) {
  const auto hyps = load_all(inputs);
  const AlignedSet set = align_many(hyps);
  const auto regions = extract_disagreements(set, hyps);
  std::cout << render_alignment(set, regions);
  return kOk;
}

struct VoteArgs {
  std::string mode = "confidence";
  double alt_threshold = 0.01;
  bool rec_only = false;
  std::vector<std::string> inputs;
  std::string output;
  std::size_t threads = 0;
};

int run_vote(const VoteArgs& a) {
  VoteConfig cfg;
  cfg.mode = parse_vote_mode(a.mode);
  cfg.alt_threshold = a.alt_threshold;
  cfg.rec_only = a.rec_only;
  validate_config(cfg);

  const bool dirs = std::all_of(a.inputs.begin(), a.inputs.end(),
                                [](const std::string& p) { return fs::is_directory(p); });
  if (!dirs) {
    const VoteResult r = vote_line(load_all(a.inputs), cfg);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    write_output(a.output, encode_utf8(r.text) + "\n");
    return kOk;
  }

  // Directory mode: one subdirectory per model, files matched by stem.
  const std::vector<std::string> stems = stems_in(a.inputs.front());
  std::vector<std::vector<LineHypothesis>> per_model(a.inputs.size());
  for (std::size_t m = 0; m < a.inputs.size(); ++m) {
    for (const auto& stem : stems) {
      per_model[m].push_back(
          load_hypothesis(fs::path(a.inputs[m]) / stem, "M" + std::to_string(m + 1)));
    }
  }
  const auto votes = vote_corpus(per_model, cfg, a.threads);
  if (!a.output.empty()) fs::create_directories(a.output);
  std::string joined;
  for (std::size_t l = 0; l < votes.size(); ++l) {
    for (const auto& w : votes[l].warnings) {
      std::cerr << "warning: " << stems[l] << ": " << w << "\n";
    }
    if (a.output.empty()) {
      joined += encode_utf8(votes[l].text) + "\n";
    } else {
      write_output((fs::path(a.output) / (stems[l] + ".txt")).string(),
                   encode_utf8(votes[l].text) + "\n");
    }
  }
  std::cout << joined;
  return kOk;
}

struct EvalArgs {
  std::string gt;
  std::vector<std::string> models;
  std::vector<std::string> voted;
  std::string csv;
};

int run_eval(const EvalArgs& a) {
  const auto gt = read_lines(a.gt);
  const auto load = [](const std::vector<std::string>& paths) {
    std::vector<NamedCorpus> out;
    for (const auto& p : paths) out.push_back({fs::path(p).stem().string(), read_lines(p)});
    return out;
  };
  const auto report = ensemble_report(gt, load(a.models), load(a.voted));
  std::cout << format_report_table(report);
  if (!a.csv.empty()) write_output(a.csv, format_report_csv(report));
  return kOk;
}

struct SimulateArgs {
  std::string gt;
  std::string config;
  std::size_t models = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const auto gt = read_lines(a.gt);
  KeyValueConfig kv;
  if (!a.config.empty()) kv = KeyValueConfig::load(a.config);
  const std::size_t count =
      a.models > 0 ? a.models : static_cast<std::size_t>(kv.get_int("models", 5));
  if (count == 0) throw UsageError("need at least one model");
  const ErrorModel shared = read_error_model(kv, "model.");
  std::vector<ErrorModel> models;
  for (std::size_t i = 0; i < count; ++i) {
    models.push_back(read_error_model(kv, "model." + std::to_string(i + 1) + ".", shared));
  }
  const auto corpora = simulate_ensemble(gt, models, a.seed);
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    const fs::path dir = fs::path(a.out) / ("M" + std::to_string(i + 1));
    fs::create_directories(dir);
    std::vector<std::u32string> texts;
    for (std::size_t l = 0; l < corpora[i].size(); ++l) {
      char name[32];
      std::snprintf(name, sizeof name, "%04zu", l + 1);
      save_hypothesis(dir / name, corpora[i][l]);
      texts.push_back(corpora[i][l].text);
    }
    write_lines(fs::path(a.out) / ("M" + std::to_string(i + 1) + ".txt"), texts);
  }
  std::cerr << "simulated " << corpora.size() << " models over " << gt.size()
            << " lines into " << a.out << "\n";
  return kOk;
}

struct PipelineArgs {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
};

int run_pipeline_cmd(const PipelineArgs& a) {
  KeyValueConfig kv = KeyValueConfig::load(a.config);
  if (!a.output.empty()) kv.set("output_dir", fs::absolute(a.output).string());
  if (a.seed) kv.set("base_seed", std::to_string(*a.seed));
  const PipelineConfig cfg =
      pipeline_config_from(kv, fs::absolute(a.config).parent_path());
  const auto start = std::chrono::steady_clock::now();
  const PipelineResult result = run_pipeline(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << format_report_table(result.report);
  std::cerr << "pipeline finished in " << secs << " s";
  if (!cfg.output_dir.empty()) std::cerr << "; reports in " << cfg.output_dir.string();
  std::cerr << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ocrvote: align and vote OCR hypotheses, evaluate ensembles"};
  app.require_subcommand(1);

  FoldsArgs folds;
  auto* c_folds = app.add_subcommand("folds", "Emit a fold plan (line_id TAB fold_id)");
  c_folds->add_option("--lines", folds.lines, "Number of GT lines")->required();
  c_folds->add_option("--folds", folds.folds, "Number of folds")->capture_default_str();
  c_folds->add_option("--seed", folds.seed, "Shuffle lines with this seed first");
  c_folds->add_option("--train-extra", folds.train_extra,
                      "Test lines per fold moved into training");
  c_folds->add_option("-o,--output", folds.output, "Output file (default stdout)");

  std::vector<std::string> align_inputs;
  auto* c_align = app.add_subcommand("align", "Render the alignment of hypothesis files");
  c_align->add_option("inputs", align_inputs, "Hypothesis .txt/.llocs files or stems")
      ->required();

  VoteArgs vote;
  auto* c_vote = app.add_subcommand("vote", "Combine hypotheses of one line or of model dirs");
  c_vote->add_option("--mode", vote.mode, "majority|confidence")
      ->check(CLI::IsMember({"majority", "confidence"}))
      ->capture_default_str();
  c_vote->add_option("--alt-threshold", vote.alt_threshold,
                     "Alternatives count above this confidence")
      ->capture_default_str();
  c_vote->add_flag("--rec-only", vote.rec_only, "Ignore alternatives in confidence mode");
  c_vote->add_option("--threads", vote.threads, "Worker threads (0 = auto)");
  c_vote->add_option("-o,--output", vote.output, "Output file or directory");
  c_vote->add_option("inputs", vote.inputs, "Hypothesis files/stems or model directories")
      ->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "CER, improvement and chi-square report");
  c_eval->add_option("--gt", ev.gt, "GT lines file")->required();
  c_eval->add_option("--model", ev.models, "Per-model prediction lines file")->required();
  c_eval->add_option("--voted", ev.voted, "Voted prediction lines file");
  c_eval->add_option("--csv", ev.csv, "Also write the CSV report here");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate synthetic OCR corpora");
  c_sim->add_option("--gt", sim.gt, "GT lines file")->required();
  c_sim->add_option("--config", sim.config, "Error model key-value file");
  c_sim->add_option("--models", sim.models, "Number of models (overrides config)");
  c_sim->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
  c_sim->add_option("--out", sim.out, "Output directory")->required();

  PipelineArgs pipe;
  auto* c_pipe = app.add_subcommand("pipeline", "Run the end-to-end workflow");
  c_pipe->add_option("--config", pipe.config, "Pipeline key-value file")->required();
  c_pipe->add_option("--output", pipe.output, "Override output_dir");
  c_pipe->add_option("--seed", pipe.seed, "Override base_seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_folds) return run_folds(folds);
    if (*c_align) return run_align(align_inputs);
    if (*c_vote) return run_vote(vote);
    if (*c_eval) return run_eval(ev);
    if (*c_sim) return run_simulate(sim);
    if (*c_pipe) return run_pipeline_cmd(pipe);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ExternalCommandError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExternal;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
