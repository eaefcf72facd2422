// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "doctest.h"
#include "ocrvote/error.hpp"
#include "ocrvote/evaluation.hpp"
#include "ocrvote/random.hpp"
#include "oracles.hpp"

using namespace ocrvote;

namespace {

std::u32string random_text(Rng& rng, std::size_t max_len) {
  std::u32string s;
  const std::size_t n = uniform_below(rng, max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s.push_back(U"abcd"[uniform_below(rng, 4)]);
  return s;
}

// A corpus whose single-line error counts are `errs` over `chars` GT chars.
std::vector<std::u32string> corrupt(const std::u32string& gt, std::size_t errs) {
  std::u32string out = gt;
  for (std::size_t i = 0; i < errs; ++i) out[i] = U'#';
  return {out};
}

}  // namespace

TEST_CASE("edit_distance examples") {
  CHECK(edit_distance(U"", U"abc") == 3);
  CHECK(edit_distance(U"abc", U"abc") == 0);
  CHECK(edit_distance(U"kitten", U"sitting") == oracle::dp_edit_distance(U"kitten", U"sitting"));
  CHECK(edit_distance(U"kitten", U"sitting") == 3);
}

TEST_CASE("compute_cer") {
  CHECK(compute_cer(U"inde marien namen", U"iade marien namen") == doctest::Approx(1.0 / 17.0));
  CHECK(compute_cer(U"abc", U"abc") == 0.0);
  CHECK(compute_cer(U"ab", U"") == 1.0);
  CHECK(compute_cer(U"ab", U"abcdef") == 2.0);
  CHECK_THROWS_WITH_AS(compute_cer(U"", U"x"), doctest::Contains("undefined CER"), DataError);
}

TEST_CASE("corpus_cer is micro-averaged") {
  const std::vector<std::u32string> gt = {U"aaaaaaaaaa", U"bbbbbbbbbb"};
  const std::vector<std::u32string> pred = {U"aaaaaaaaax", U"bbbbbbbxxx"};
  const CerReport r = corpus_cer(gt, pred);
  CHECK(r.total_errors == 4);
  CHECK(r.total_chars == 20);
  CHECK(r.cer == doctest::Approx(0.2));
  CHECK(corpus_cer(gt, gt).cer == 0.0);

  const std::vector<std::u32string> one_gt = {U"inde marien namen"};
  const std::vector<std::u32string> one_pred = {U"iade marien namen"};
  CHECK(corpus_cer(one_gt, one_pred).cer == compute_cer(one_gt[0], one_pred[0]));

  const std::vector<std::u32string> short_pred = {U"x"};
  CHECK_THROWS_AS(corpus_cer(gt, short_pred), DataError);
}

TEST_CASE("improvement_rate") {
  CHECK(improvement_rate(0.0332, 0.0182) == doctest::Approx(0.4518).epsilon(1e-3));
  CHECK(std::round(improvement_rate(0.0332, 0.0182) * 100) == 45);
  CHECK(std::round(improvement_rate(0.03668, 0.0182) * 100) == 50);
  CHECK(improvement_rate(0.05, 0.05) == 0.0);
  CHECK_THROWS_AS(improvement_rate(0.0, 0.01), UsageError);
  // antitone in voted CER
  CHECK(improvement_rate(0.1, 0.02) > improvement_rate(0.1, 0.03));
}

TEST_CASE("chi_square_errors against the cell-sum oracle") {
  const auto big = chi_square_errors(100, 10000, 50, 10000);
  CHECK(big.statistic == doctest::Approx(oracle::pearson_chi2(100, 10000, 50, 10000)).epsilon(1e-12));
  CHECK(big.statistic == doctest::Approx(16.792611251).epsilon(1e-9));
  CHECK(big.p_value == doctest::Approx(oracle::chi2_df1_survival_quadrature(big.statistic)).epsilon(1e-6));
  CHECK(big.p_value == doctest::Approx(4.1695e-5).epsilon(1e-3));
  CHECK(big.p_value < 0.001);

  const auto small = chi_square_errors(30, 1000, 15, 1000);
  CHECK(small.statistic == doctest::Approx(5.115089514).epsilon(1e-9));
  CHECK(small.p_value == doctest::Approx(0.0237186).epsilon(1e-4));
  CHECK(small.p_value > 0.001);

  const auto same = chi_square_errors(40, 900, 40, 900);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  const auto none = chi_square_errors(0, 900, 0, 900);
  CHECK(none.statistic == 0.0);
  CHECK(none.p_value == 1.0);

  CHECK_THROWS_AS(chi_square_errors(0, 0, 0, 0), UsageError);
  CHECK_THROWS_AS(chi_square_errors(5, 4, 0, 10), UsageError);
}

TEST_CASE("property: chi-square symmetry and monotone p") {
  Rng rng(12);
  double prev_stat = -1.0;
  double prev_p = 2.0;
  for (std::size_t err = 50; err <= 150; ++err) {
    const auto r = chi_square_errors(err, 10000, 50, 10000);
    const auto s = chi_square_errors(50, 10000, err, 10000);
    REQUIRE(r.statistic == doctest::Approx(s.statistic));
    REQUIRE(r.p_value == doctest::Approx(s.p_value));
    REQUIRE(r.statistic >= prev_stat);
    REQUIRE(r.p_value <= prev_p);
    prev_stat = r.statistic;
    prev_p = r.p_value;
  }
  for (int i = 0; i < 500; ++i) {
    const std::size_t na = 1 + uniform_below(rng, 5000);
    const std::size_t nb = 1 + uniform_below(rng, 5000);
    const std::size_t ea = uniform_below(rng, na + 1);
    const std::size_t eb = uniform_below(rng, nb + 1);
    const auto r = chi_square_errors(ea, na, eb, nb);
    REQUIRE(r.statistic >= 0.0);
    REQUIRE(r.p_value >= 0.0);
    REQUIRE(r.p_value <= 1.0);
    if (ea + eb > 0 && ea + eb < na + nb) {
      REQUIRE(r.statistic == doctest::Approx(oracle::pearson_chi2(ea, na, eb, nb)).epsilon(1e-9));
    }
  }
}

TEST_CASE("property: edit distance is a metric matching the DP oracle") {
  Rng rng(13);
  for (int iter = 0; iter < 3000; ++iter) {
    const auto a = random_text(rng, 12);
    const auto b = random_text(rng, 12);
    const auto c = random_text(rng, 12);
    const std::size_t ab = edit_distance(a, b);
    REQUIRE(ab == oracle::dp_edit_distance(a, b));
    REQUIRE((ab == 0) == (a == b));
    REQUIRE(ab == edit_distance(b, a));
    REQUIRE(edit_distance(a, c) <= ab + edit_distance(b, c));
  }
}

TEST_CASE("ensemble report reproduces the 5-fold table row") {
  // 10000 GT characters; model error counts give the listed CERs.
  const std::u32string gt_line(10000, U'a');
  const std::vector<std::u32string> gt = {gt_line};
  std::vector<NamedCorpus> models;
  const std::size_t errs[] = {393, 332, 407, 361, 341};
  for (std::size_t i = 0; i < 5; ++i) {
    models.push_back({"M" + std::to_string(i + 1), corrupt(gt_line, errs[i])});
  }
  const std::vector<NamedCorpus> voted = {{"confidence", corrupt(gt_line, 182)}};
  const EnsembleReport r = ensemble_report(gt, models, voted);
  CHECK(r.best_cer == doctest::Approx(0.0332));
  CHECK(r.average_cer == doctest::Approx(0.03668));
  CHECK(r.worst_cer == doctest::Approx(0.0407));
  REQUIRE(r.voted.size() == 1);
  CHECK(std::round(*r.voted[0].improvement_best * 100) == 45);
  CHECK(std::round(*r.voted[0].improvement_avg * 100) == 50);
  CHECK(std::round(*r.voted[0].improvement_worst * 100) == 55);
  CHECK(r.average_errors == 367);
  CHECK(r.voted[0].vs_best.p_value < 0.001);

  const std::string csv = format_report_csv(r);
  CHECK(csv.rfind("model_id,cer,improvement_best,improvement_avg,improvement_worst,chi2,p\n", 0) == 0);
  CHECK(csv.find("\nM2,0.033200,,,,") != std::string::npos);
  CHECK(csv.find("\nconfidence,0.018200,0.451807,0.503817,0.552826,") != std::string::npos);
  CHECK(format_report_table(r).find("chi-square over character counts") != std::string::npos);
}

TEST_CASE("ensemble report degenerate cases") {
  const std::vector<std::u32string> gt = {U"abc", U"de"};
  SUBCASE("all perfect: improvements undefined") {
    const std::vector<NamedCorpus> models = {{"M1", gt}, {"M2", gt}};
    const std::vector<NamedCorpus> voted = {{"v", gt}};
    const auto r = ensemble_report(gt, models, voted);
    CHECK(r.voted[0].cer.cer == 0.0);
    CHECK_FALSE(r.voted[0].improvement_best.has_value());
    CHECK(format_report_csv(r).find("v,0.000000,n/a,n/a,n/a,") != std::string::npos);
  }
  SUBCASE("single model equal to the vote") {
    const std::vector<std::u32string> pred = {U"abx", U"de"};
    const std::vector<NamedCorpus> models = {{"M1", pred}};
    const std::vector<NamedCorpus> voted = {{"v", pred}};
    const auto r = ensemble_report(gt, models, voted);
    CHECK(*r.voted[0].improvement_best == 0.0);
    CHECK(*r.voted[0].improvement_avg == 0.0);
  }
}
