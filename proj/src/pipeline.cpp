///////////////////////////////////////////////////////////////////////
// File:        pipeline.cpp
// Description: End-to-end workflow orchestration.
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

#include "ocrvote/pipeline.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "ocrvote/error.hpp"
#include "ocrvote/random.hpp"
#include "ocrvote/utf8.hpp"

namespace ocrvote {
namespace {

namespace fs = std::filesystem;

// Stream tags for derive_seed.
constexpr std::uint64_t kPoolStream = 0x706f6f6c;
constexpr std::uint64_t kEvalStream = 0x6576616c;
constexpr std::uint64_t kJitterStream = 0x6a697474;
constexpr std::uint64_t kTestStream = 0x74657374;

std::size_t as_count(const KeyValueConfig& kv, const std::string& key,
                     std::size_t fallback) {
  const std::int64_t v = kv.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw UsageError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string stem_name(std::size_t line) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", line + 1);
  return buf;
}

void write_file(const fs::path& path, const std::string& content,
                std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  written.push_back(path);
}

std::vector<std::u32string> pick_lines(const std::vector<std::u32string>& all,
                                       const std::vector<std::size_t>& ids) {
  std::vector<std::u32string> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) out.push_back(all[id]);
  return out;
}

ErrorModel scaled(ErrorModel m, double factor) {
  m.sub_rate *= factor;
  m.ins_rate *= factor;
  m.del_rate *= factor;
  validate_model(m);
  return m;
}

std::vector<std::u32string> texts_of(const std::vector<LineHypothesis>& hyps) {
  std::vector<std::u32string> out;
  out.reserve(hyps.size());
  for (const auto& h : hyps) out.push_back(h.text);
  return out;
}

void run_synthetic(const PipelineConfig& cfg, const std::vector<std::u32string>& pool,
                   PipelineResult& result) {
  const SynthSource& src = cfg.synth;
  for (std::size_t f = 0; f < cfg.n_folds; ++f) {
    const ErrorModel& base =
        src.fold_models.size() == 1 ? src.fold_models.front() : src.fold_models[f];
    const auto test_ids = result.plan.splits[f].test;
    const auto test_gt = pick_lines(pool, test_ids);

    std::vector<ErrorModel> candidates;
    std::vector<std::vector<std::u32string>> test_preds;
    for (std::size_t c = 0; c < src.candidates_per_fold; ++c) {
      Rng rng(derive_seed(cfg.base_seed, kJitterStream, f * 1000 + c));
      const double factor = 1.0 + src.candidate_jitter * (2.0 * uniform01(rng) - 1.0);
      candidates.push_back(scaled(base, factor));
      const std::uint64_t cand_seed = derive_seed(cfg.base_seed, f, c);
      std::vector<std::u32string> preds;
      preds.reserve(test_gt.size());
      for (std::size_t i = 0; i < test_gt.size(); ++i) {
        preds.push_back(simulate_model_line(test_gt[i], candidates.back(),
                                            derive_seed(cand_seed, kTestStream, test_ids[i]))
                            .text);
      }
      test_preds.push_back(std::move(preds));
    }

    FoldSelection sel;
    sel.fold = f;
    sel.chosen = select_best_model(test_gt, test_preds);
    for (const auto& preds : test_preds) {
      sel.candidate_cers.push_back(corpus_cer(test_gt, preds).cer);
    }

    const std::uint64_t winner_seed = derive_seed(cfg.base_seed, f, sel.chosen);
    const std::string id = "M" + std::to_string(f + 1);
    std::vector<LineHypothesis> hyps;
    hyps.reserve(result.eval_gt.size());
    for (std::size_t l = 0; l < result.eval_gt.size(); ++l) {
      hyps.push_back(simulate_model_line(result.eval_gt[l], candidates[sel.chosen],
                                         derive_seed(winner_seed, kEvalStream, l), id));
    }
    result.hypotheses.push_back(std::move(hyps));
    result.selections.push_back(std::move(sel));
  }
}

std::string substitute_all(std::string text, const std::string& key,
                           const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

int run_shell(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return 127;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

void run_external(const PipelineConfig& cfg, const std::vector<std::u32string>& pool,
                  PipelineResult& result) {
  const ExternalSource& ext = *cfg.external;
  std::vector<std::string> commands;
  std::vector<fs::path> pred_dirs;
  for (std::size_t f = 0; f < cfg.n_folds; ++f) {
    const fs::path dir = cfg.output_dir / ("fold_" + std::to_string(f + 1));
    const fs::path pred = dir / "pred";
    fs::create_directories(pred);
    write_lines(dir / "train.txt", pick_lines(pool, result.plan.splits[f].train));
    write_lines(dir / "test.txt", pick_lines(pool, result.plan.splits[f].test));
    write_lines(dir / "eval.txt", result.eval_gt);
    std::string cmd = ext.command_template;
    cmd = substitute_all(cmd, "{fold}", std::to_string(f + 1));
    cmd = substitute_all(cmd, "{train}", (dir / "train.txt").string());
    cmd = substitute_all(cmd, "{test}", (dir / "test.txt").string());
    cmd = substitute_all(cmd, "{eval}", (dir / "eval.txt").string());
    cmd = substitute_all(cmd, "{out}", pred.string());
    commands.push_back(std::move(cmd));
    pred_dirs.push_back(pred);
  }

  std::vector<int> status(commands.size(), 0);
  const std::size_t limit = std::max<std::size_t>(1, ext.max_parallel);
  for (std::size_t begin = 0; begin < commands.size(); begin += limit) {
    std::vector<std::future<int>> batch;
    const std::size_t end = std::min(commands.size(), begin + limit);
    for (std::size_t f = begin; f < end; ++f) {
      batch.push_back(std::async(std::launch::async, run_shell, commands[f]));
    }
    for (std::size_t f = begin; f < end; ++f) status[f] = batch[f - begin].get();
  }
  for (std::size_t f = 0; f < status.size(); ++f) {
    if (status[f] != 0) {
      throw ExternalCommandError("external command for fold " + std::to_string(f + 1) +
                                     " exited with status " + std::to_string(status[f]),
                                 status[f]);
    }
  }

  for (std::size_t f = 0; f < cfg.n_folds; ++f) {
    std::vector<LineHypothesis> hyps;
    for (std::size_t l = 0; l < result.eval_gt.size(); ++l) {
      hyps.push_back(load_hypothesis(pred_dirs[f] / stem_name(l),
                                     "M" + std::to_string(f + 1)));
    }
    result.hypotheses.push_back(std::move(hyps));
  }
}

std::string system_name(const VoteConfig& v) {
  if (v.mode == VoteMode::kMajority) return "majority";
  return v.rec_only ? "confidence_rec_only" : "confidence";
}

}  // namespace

std::vector<std::u32string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<std::u32string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(decode_utf8(line));
  }
  return lines;
}

void write_lines(const fs::path& path, const std::vector<std::u32string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& l : lines) out << encode_utf8(l) << '\n';
}

PipelineConfig pipeline_config_from(const KeyValueConfig& kv, const fs::path& base_dir) {
  PipelineConfig cfg;
  cfg.n_folds = as_count(kv, "n_folds", cfg.n_folds);
  cfg.n_lines = as_count(kv, "n_lines", cfg.n_lines);
  cfg.eval_lines = as_count(kv, "eval_lines", cfg.eval_lines);
  cfg.train_extra = as_count(kv, "train_extra", cfg.train_extra);
  cfg.shuffle = kv.get_bool("shuffle", cfg.shuffle);
  cfg.vote.mode = parse_vote_mode(kv.get_string("mode", "confidence"));
  cfg.vote.alt_threshold = kv.get_double("alt_threshold", cfg.vote.alt_threshold);
  cfg.vote.rec_only = kv.get_bool("rec_only", cfg.vote.rec_only);
  cfg.base_seed = static_cast<std::uint64_t>(kv.get_int("base_seed", 1));
  cfg.threads = as_count(kv, "threads", cfg.threads);
  if (auto v = kv.get("gt_file")) cfg.gt_file = resolve(base_dir, *v);
  if (auto v = kv.get("eval_file")) cfg.eval_file = resolve(base_dir, *v);
  if (auto v = kv.get("output_dir")) cfg.output_dir = resolve(base_dir, *v);

  if (auto cmd = kv.get("trainer_command")) {
    ExternalSource ext;
    ext.command_template = *cmd;
    ext.max_parallel = as_count(kv, "max_parallel", ext.max_parallel);
    cfg.external = ext;
  }

  cfg.synth.candidates_per_fold =
      as_count(kv, "candidates_per_fold", cfg.synth.candidates_per_fold);
  cfg.synth.candidate_jitter = kv.get_double("candidate_jitter", cfg.synth.candidate_jitter);
  const ErrorModel shared = read_error_model(kv, "model.");
  bool per_fold = false;
  for (const auto& [key, value] : kv.values()) {
    if (key.rfind("model.", 0) == 0 && key.size() > 6 &&
        std::isdigit(static_cast<unsigned char>(key[6]))) {
      per_fold = true;
    }
  }
  cfg.synth.fold_models.clear();
  if (per_fold) {
    for (std::size_t f = 0; f < cfg.n_folds; ++f) {
      cfg.synth.fold_models.push_back(
          read_error_model(kv, "model." + std::to_string(f + 1) + ".", shared));
    }
  } else {
    cfg.synth.fold_models.push_back(shared);
  }
  validate_pipeline_config(cfg);
  return cfg;
}

void validate_pipeline_config(const PipelineConfig& cfg) {
  if (cfg.n_folds < 2) throw UsageError("n_folds must be at least 2");
  if (cfg.n_lines < cfg.n_folds) throw UsageError("n_lines must be >= n_folds");
  validate_config(cfg.vote);
  if (cfg.eval_file.empty() && cfg.eval_lines == 0) {
    throw UsageError("need eval_lines > 0 or an eval_file");
  }
  if (!cfg.gt_file.empty() && !fs::exists(cfg.gt_file)) {
    throw UsageError("gt_file not found: " + cfg.gt_file.string());
  }
  if (!cfg.eval_file.empty() && !fs::exists(cfg.eval_file)) {
    throw UsageError("eval_file not found: " + cfg.eval_file.string());
  }
  if (cfg.external) {
    if (cfg.external->command_template.empty()) throw UsageError("empty trainer_command");
    if (cfg.output_dir.empty()) throw UsageError("trainer_command needs an output_dir");
  } else {
    const auto& models = cfg.synth.fold_models;
    if (models.size() != 1 && models.size() != cfg.n_folds) {
      throw UsageError("need one error model or one per fold");
    }
    for (const auto& m : models) validate_model(m);
    if (cfg.synth.candidates_per_fold == 0) throw UsageError("candidates_per_fold must be >= 1");
    if (!(cfg.synth.candidate_jitter >= 0.0 && cfg.synth.candidate_jitter < 1.0)) {
      throw UsageError("candidate_jitter must lie in [0, 1)");
    }
  }
}

std::vector<VoteResult> vote_corpus(const std::vector<std::vector<LineHypothesis>>& per_model,
                                    const VoteConfig& cfg, std::size_t threads) {
  if (per_model.empty()) throw UsageError("no hypotheses to vote");
  const std::size_t n_lines = per_model.front().size();
  for (const auto& m : per_model) {
    if (m.size() != n_lines) throw DataError("models disagree on line count");
  }
  std::vector<VoteResult> out(n_lines);
  std::vector<std::exception_ptr> errors(n_lines);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<LineHypothesis> hyps(per_model.size());
    for (std::size_t l; (l = next.fetch_add(1)) < n_lines;) {
      try {
        for (std::size_t m = 0; m < per_model.size(); ++m) hyps[m] = per_model[m][l];
        out[l] = vote_line(hyps, cfg);
      } catch (...) {
        errors[l] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  threads = std::min(threads, std::max<std::size_t>(1, n_lines));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  validate_pipeline_config(cfg);
  PipelineResult result;

  std::vector<std::u32string> pool;
  if (cfg.gt_file.empty()) {
    pool = generate_text_lines(cfg.n_lines, derive_seed(cfg.base_seed, kPoolStream));
  } else {
    pool = read_lines(cfg.gt_file);
    if (pool.size() < cfg.n_lines) {
      throw DataError("gt_file has " + std::to_string(pool.size()) + " lines, need " +
                      std::to_string(cfg.n_lines));
    }
    pool.resize(cfg.n_lines);
  }
  result.eval_gt = cfg.eval_file.empty()
                       ? generate_text_lines(cfg.eval_lines,
                                             derive_seed(cfg.base_seed, kEvalStream))
                       : read_lines(cfg.eval_file);
  for (std::size_t l = 0; l < result.eval_gt.size(); ++l) {
    if (result.eval_gt[l].empty()) {
      throw DataError("evaluation line " + std::to_string(l + 1) + " is empty");
    }
  }

  result.plan = make_fold_plan(cfg.n_lines, cfg.n_folds,
                               cfg.shuffle ? std::optional(cfg.base_seed) : std::nullopt,
                               cfg.train_extra);
  if (cfg.external) {
    run_external(cfg, pool, result);
  } else {
    run_synthetic(cfg, pool, result);
  }

  VoteConfig other = cfg.vote;
  other.mode = cfg.vote.mode == VoteMode::kMajority ? VoteMode::kConfidence
                                                    : VoteMode::kMajority;
  std::vector<std::string> warnings;
  for (const VoteConfig& vc : {cfg.vote, other}) {
    const std::vector<VoteResult> votes = vote_corpus(result.hypotheses, vc, cfg.threads);
    NamedCorpus corpus{system_name(vc), {}};
    for (std::size_t l = 0; l < votes.size(); ++l) {
      corpus.lines.push_back(votes[l].text);
      if (vc.mode == VoteMode::kConfidence) {
        for (const auto& w : votes[l].warnings) {
          warnings.push_back("line " + std::to_string(l + 1) + ": " + w);
        }
      }
    }
    result.voted.push_back(std::move(corpus));
  }

  std::vector<NamedCorpus> models;
  for (const auto& hyps : result.hypotheses) {
    models.push_back({hyps.front().model_id, texts_of(hyps)});
  }
  result.report = ensemble_report(result.eval_gt, models, result.voted);
  result.report.warnings = std::move(warnings);

  if (cfg.output_dir.empty()) return result;

  fs::create_directories(cfg.output_dir / "predictions");
  write_file(cfg.output_dir / "fold_plan.tsv", write_fold_plan(result.plan), result.written);

  std::ostringstream txt;
  txt << "folds: " << cfg.n_folds << ", pool lines: " << cfg.n_lines
      << ", evaluation lines: " << result.eval_gt.size() << ", seed: " << cfg.base_seed
      << "\n";
  for (std::size_t f = 0; f < result.plan.splits.size(); ++f) {
    txt << "fold " << f + 1 << ": train " << result.plan.splits[f].train.size() << " / test "
        << result.plan.splits[f].test.size();
    if (f < result.selections.size()) {
      const auto& sel = result.selections[f];
      txt << ", selected candidate " << sel.chosen + 1 << " of "
          << sel.candidate_cers.size() << " (test CER "
          << format_confidence(sel.candidate_cers[sel.chosen]) << ")";
    }
    txt << "\n";
  }
  txt << "\n" << format_report_table(result.report);
  write_file(cfg.output_dir / "report.txt", txt.str(), result.written);
  write_file(cfg.output_dir / "report.csv", format_report_csv(result.report), result.written);

  for (const NamedCorpus& v : result.voted) {
    const fs::path p = cfg.output_dir / ("voted_" + v.id + ".txt");
    write_lines(p, v.lines);
    result.written.push_back(p);
  }
  for (const NamedCorpus& m : models) {
    const fs::path p = cfg.output_dir / "predictions" / (m.id + ".txt");
    write_lines(p, m.lines);
    result.written.push_back(p);
  }
  return result;
}

}  // namespace ocrvote
