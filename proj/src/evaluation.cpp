///////////////////////////////////////////////////////////////////////
// File:        evaluation.cpp
// Description: CER, improvement and significance computations.
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

#include "ocrvote/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ocrvote/error.hpp"

namespace ocrvote {

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double compute_cer(std::u32string_view gt, std::u32string_view pred) {
  if (gt.empty()) throw DataError("undefined CER: empty ground truth");
  return static_cast<double>(edit_distance(gt, pred)) /
         static_cast<double>(gt.size());
}

CerReport corpus_cer(std::span<const std::u32string> gt_lines,
                     std::span<const std::u32string> pred_lines) {
  if (gt_lines.size() != pred_lines.size()) {
    throw DataError("line count mismatch: " + std::to_string(gt_lines.size()) +
                    " GT vs " + std::to_string(pred_lines.size()) +
                    " predicted");
  }
  CerReport report;
  report.per_line.reserve(gt_lines.size());
  for (std::size_t i = 0; i < gt_lines.size(); ++i) {
    if (gt_lines[i].empty()) {
      throw DataError("undefined CER: empty ground truth line " +
                      std::to_string(i + 1));
    }
    LineErrors line{edit_distance(gt_lines[i], pred_lines[i]),
                    gt_lines[i].size()};
    report.total_errors += line.errors;
    report.total_chars += line.gt_chars;
    report.per_line.push_back(line);
  }
  if (report.total_chars > 0) {
    report.cer = static_cast<double>(report.total_errors) /
                 static_cast<double>(report.total_chars);
  }
  return report;
}

double improvement_rate(double base_cer, double voted_cer) {
  if (!(base_cer > 0.0)) {
    throw UsageError("improvement undefined for a zero base CER");
  }
  return (base_cer - voted_cer) / base_cer;
}

SignificanceResult chi_square_errors(std::size_t err_a, std::size_t n_a,
                                     std::size_t err_b, std::size_t n_b) {
  if (n_a == 0 || n_b == 0) {
    throw UsageError("chi-square: degenerate table (empty group)");
  }
  if (err_a > n_a || err_b > n_b) {
    throw UsageError("chi-square: error count exceeds trial count");
  }
  const double a = static_cast<double>(err_a);
  const double b = static_cast<double>(n_a - err_a);
  const double c = static_cast<double>(err_b);
  const double d = static_cast<double>(n_b - err_b);
  const double errors = a + c;
  const double correct = b + d;
  // A zero column margin means both proportions are 0 or both are 1.
  if (errors == 0.0 || correct == 0.0) return {0.0, 1.0};

  const double n = a + b + c + d;
  const double cross = a * d - b * c;
  const double stat =
      n * cross * cross / ((a + b) * (c + d) * errors * correct);
  return {stat, std::erfc(std::sqrt(stat / 2.0))};
}

EnsembleReport ensemble_report(std::span<const std::u32string> gt,
                               std::span<const NamedCorpus> per_model_preds,
                               std::span<const NamedCorpus> voted_preds) {
  if (per_model_preds.empty()) throw UsageError("ensemble report needs a model");
  EnsembleReport report;
  for (const NamedCorpus& model : per_model_preds) {
    report.models.push_back({model.id, corpus_cer(gt, model.lines), {}});
  }
  report.evaluated_chars = report.models.front().cer.total_chars;

  const auto by_cer = [](const ModelRow& x, const ModelRow& y) {
    return x.cer.total_errors < y.cer.total_errors;
  };
  const ModelRow& best =
      *std::min_element(report.models.begin(), report.models.end(), by_cer);
  report.best_cer = best.cer.cer;
  report.worst_cer =
      std::max_element(report.models.begin(), report.models.end(), by_cer)
          ->cer.cer;
  double cer_sum = 0.0;
  double err_sum = 0.0;
  for (const ModelRow& m : report.models) {
    cer_sum += m.cer.cer;
    err_sum += static_cast<double>(m.cer.total_errors);
  }
  const double k = static_cast<double>(report.models.size());
  report.average_cer = cer_sum / k;
  report.average_errors = static_cast<std::size_t>(std::llround(err_sum / k));

  const auto improvement = [](double base, double voted) -> std::optional<double> {
    if (!(base > 0.0)) return std::nullopt;
    return improvement_rate(base, voted);
  };
  const std::size_t chars = report.evaluated_chars;
  for (const NamedCorpus& voted : voted_preds) {
    VotedRow row;
    row.id = voted.id;
    row.cer = corpus_cer(gt, voted.lines);
    row.improvement_best = improvement(report.best_cer, row.cer.cer);
    row.improvement_avg = improvement(report.average_cer, row.cer.cer);
    row.improvement_worst = improvement(report.worst_cer, row.cer.cer);
    if (chars > 0) {
      row.vs_best = chi_square_errors(row.cer.total_errors, chars,
                                      best.cer.total_errors, chars);
      row.vs_average = chi_square_errors(row.cer.total_errors, chars,
                                         report.average_errors, chars);
    }
    report.voted.push_back(std::move(row));
  }
  if (!report.voted.empty() && chars > 0) {
    for (ModelRow& m : report.models) {
      m.vs_voted = chi_square_errors(report.voted.front().cer.total_errors,
                                     chars, m.cer.total_errors, chars);
    }
  }
  return report;
}

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string percent(std::optional<double> v) {
  return v ? fixed(*v * 100.0, 2) + "%" : "n/a";
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_report_table(const EnsembleReport& report) {
  std::string out;
  out += "# significance: chi-square over character counts, df=1, "
         "no continuity correction\n";
  out += "# evaluated characters: " + std::to_string(report.evaluated_chars) +
         "\n\n";
  out += pad("system", 16) + pad("errors", 10) + pad("CER", 10) +
         pad("impr best", 11) + pad("impr avg", 11) + pad("impr worst", 11) +
         pad("chi2 best", 12) + pad("p best", 14) + pad("chi2 avg", 12) +
         "p avg\n";
  for (const ModelRow& m : report.models) {
    out += pad(m.id, 16) + pad(std::to_string(m.cer.total_errors), 10) +
           pad(percent(m.cer.cer), 10) + "\n";
  }
  for (const VotedRow& v : report.voted) {
    out += pad(v.id, 16) + pad(std::to_string(v.cer.total_errors), 10) +
           pad(percent(v.cer.cer), 10) + pad(percent(v.improvement_best), 11) +
           pad(percent(v.improvement_avg), 11) +
           pad(percent(v.improvement_worst), 11) +
           pad(fixed(v.vs_best.statistic, 3), 12) +
           pad(sci(v.vs_best.p_value), 14) +
           pad(fixed(v.vs_average.statistic, 3), 12) +
           sci(v.vs_average.p_value) + "\n";
  }
  out += "\nbest " + percent(report.best_cer) + ", average " +
         percent(report.average_cer) + ", worst " + percent(report.worst_cer) +
         "\n";
  if (!report.warnings.empty()) {
    out += "\nwarnings:\n";
    for (const auto& w : report.warnings) out += "  " + w + "\n";
  }
  return out;
}

std::string format_report_csv(const EnsembleReport& report) {
  const auto opt = [](std::optional<double> v) {
    return v ? fixed(*v, 6) : std::string("n/a");
  };
  std::string out =
      "model_id,cer,improvement_best,improvement_avg,improvement_worst,chi2,p\n";
  for (const ModelRow& m : report.models) {
    out += m.id + "," + fixed(m.cer.cer, 6) + ",,,,";
    if (m.vs_voted) {
      out += fixed(m.vs_voted->statistic, 6) + "," + sci(m.vs_voted->p_value);
    } else {
      out += ",";
    }
    out += "\n";
  }
  for (const VotedRow& v : report.voted) {
    out += v.id + "," + fixed(v.cer.cer, 6) + "," + opt(v.improvement_best) +
           "," + opt(v.improvement_avg) + "," + opt(v.improvement_worst) + "," +
           fixed(v.vs_best.statistic, 6) + "," + sci(v.vs_best.p_value) + "\n";
  }
  return out;
}

}  // namespace ocrvote
