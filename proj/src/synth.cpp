///////////////////////////////////////////////////////////////////////
// File:        synth.cpp
// Description: Synthetic OCR channel.
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

#include "ocrvote/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include "ocrvote/error.hpp"
#include "ocrvote/random.hpp"
#include "ocrvote/utf8.hpp"

namespace ocrvote {
namespace {

// Confidences live on a 1e-6 grid so they survive write_llocs exactly.
double quantize(double x) { return std::round(x * 1e6) / 1e6; }

double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

class Channel {
 public:
  Channel(const ErrorModel& model, std::uint64_t seed)
      : model_(model), rng_(seed) {
    alphabet_ = model.alphabet;
    std::sort(alphabet_.begin(), alphabet_.end());
    alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
  }

  LineHypothesis run(std::u32string_view gt, std::string model_id) {
    std::vector<LlocsEntry> entries;
    entries.reserve(gt.size() + 4);
    const double del = model_.del_rate;
    const double sub = model_.del_rate + model_.sub_rate;
    for (char32_t truth : gt) {
      const double u = uniform01(rng_);
      if (u < del) {
        // deleted
      } else if (u < sub) {
        const std::optional<char32_t> wrong = substitute(truth);
        entries.push_back(wrong ? substituted(*wrong, truth) : kept(truth));
      } else {
        entries.push_back(kept(truth));
      }
      if (model_.ins_rate > 0.0 && uniform01(rng_) < model_.ins_rate &&
          !alphabet_.empty()) {
        entries.push_back(inserted(alphabet_[uniform_below(rng_, alphabet_.size())]));
      }
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      entries[i].x_start = static_cast<int>(i) * kSynthBoxWidth;
      entries[i].x_end = entries[i].x_start + kSynthBoxWidth - 2;
    }
    return make_hypothesis(std::move(entries), std::move(model_id));
  }

 private:
  std::optional<char32_t> substitute(char32_t truth) {
    const auto it = model_.confusions.find(truth);
    if (it != model_.confusions.end() && !it->second.empty()) {
      double total = 0.0;
      for (const auto& [ch, w] : it->second) total += w;
      double x = uniform01(rng_) * total;
      for (const auto& [ch, w] : it->second) {
        if (x < w) return ch == truth ? std::nullopt : std::optional(ch);
        x -= w;
      }
      const char32_t last = it->second.back().first;
      return last == truth ? std::nullopt : std::optional(last);
    }
    std::u32string pool;
    for (char32_t c : alphabet_) {
      if (c != truth) pool.push_back(c);
    }
    if (pool.empty()) return std::nullopt;
    return pool[uniform_below(rng_, pool.size())];
  }

  LlocsEntry kept(char32_t ch) {
    const double noise = model_.conf_noise * (2.0 * uniform01(rng_) - 1.0);
    const double top = std::clamp(model_.conf_correct + noise, 0.01, 1.0);
    return distribute(ch, top, std::nullopt, 0.0);
  }

  LlocsEntry substituted(char32_t wrong, char32_t truth) {
    const double top = uniform_in(rng_, 0.5, 0.9);
    if (uniform01(rng_) < model_.conf_noise) {
      return distribute(wrong, top, std::nullopt, 0.0);
    }
    const double share = uniform_in(rng_, 0.6, 1.0);
    return distribute(wrong, top, truth, (1.0 - top) * share);
  }

  LlocsEntry inserted(char32_t ch) {
    return distribute(ch, uniform_in(rng_, 0.3, 0.7), std::nullopt, 0.0);
  }

  // Top-1 `ch` with nominal confidence `top`; an optional forced
  // alternative; the rest of the mass goes to up to two random glyphs.
  // The top-1 confidence absorbs rounding so the total is exactly one.
  LlocsEntry distribute(char32_t ch, double top, std::optional<char32_t> forced,
                        double forced_conf) {
    LlocsEntry e;
    e.ch = ch;
    double used = 0.0;
    if (forced && quantize(forced_conf) >= kAlternativeStorageFloor) {
      e.alternatives.push_back({*forced, quantize(forced_conf)});
      used += e.alternatives.back().conf;
    }

    std::u32string pool;
    for (char32_t c : alphabet_) {
      if (c != ch && (!forced || c != *forced)) pool.push_back(c);
    }
    double leftover = std::max(0.0, 1.0 - top - used);
    std::size_t k = std::min<std::size_t>(2, pool.size());
    while (k > 0 && leftover < static_cast<double>(k) * kAlternativeStorageFloor) --k;
    if (k > 0) {
      std::vector<double> weights(k);
      double wsum = 0.0;
      for (double& w : weights) wsum += (w = 0.1 + uniform01(rng_));
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t pick = uniform_below(rng_, pool.size());
        const double conf = quantize(leftover * weights[i] / wsum);
        if (conf >= kAlternativeStorageFloor) {
          e.alternatives.push_back({pool[pick], conf});
          used += conf;
        }
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }
    std::sort(e.alternatives.begin(), e.alternatives.end(),
              [](const Alternative& a, const Alternative& b) {
                return a.conf != b.conf ? a.conf > b.conf : a.ch < b.ch;
              });
    e.conf = quantize(1.0 - used);
    return e;
  }

  const ErrorModel& model_;
  Rng rng_;
  std::u32string alphabet_;
};

char32_t single_char(const std::string& key, const std::string& text) {
  const std::u32string cp = decode_utf8(text);
  if (cp.size() != 1) throw DataError("config key '" + key + "': expected one character");
  return cp.front();
}

}  // namespace

void validate_model(const ErrorModel& m) {
  if (m.sub_rate < 0 || m.ins_rate < 0 || m.del_rate < 0) {
    throw UsageError("error rates must be non-negative");
  }
  if (!(m.sub_rate + m.ins_rate + m.del_rate < 1.0)) {
    throw UsageError("error rates must sum to less than 1");
  }
  if (!(m.conf_correct > 0.0 && m.conf_correct <= 1.0)) {
    throw UsageError("conf_correct must lie in (0, 1]");
  }
  if (!(m.conf_noise >= 0.0 && m.conf_noise <= 1.0)) {
    throw UsageError("conf_noise must lie in [0, 1]");
  }
  if (m.alphabet.empty() && (m.sub_rate > 0 || m.ins_rate > 0)) {
    throw UsageError("substitutions and insertions need an alphabet");
  }
  for (const auto& [src, targets] : m.confusions) {
    for (const auto& [dst, weight] : targets) {
      if (m.alphabet.find(dst) == std::u32string::npos) {
        throw UsageError("confusion target '" + encode_utf8(dst) +
                         "' is not in the alphabet");
      }
      if (!(weight > 0.0)) throw UsageError("confusion weights must be positive");
    }
  }
}

ErrorModel read_error_model(const KeyValueConfig& cfg, const std::string& prefix,
                            const ErrorModel& defaults) {
  ErrorModel m = defaults;
  m.sub_rate = cfg.get_double(prefix + "sub_rate", m.sub_rate);
  m.ins_rate = cfg.get_double(prefix + "ins_rate", m.ins_rate);
  m.del_rate = cfg.get_double(prefix + "del_rate", m.del_rate);
  m.conf_correct = cfg.get_double(prefix + "conf_correct", m.conf_correct);
  m.conf_noise = cfg.get_double(prefix + "conf_noise", m.conf_noise);
  if (auto a = cfg.get(prefix + "alphabet")) m.alphabet = decode_utf8(*a);

  const std::string conf_prefix = prefix + "confusion.";
  for (const auto& [key, value] : cfg.values()) {
    if (key.rfind(conf_prefix, 0) != 0) continue;
    const char32_t src = single_char(key, key.substr(conf_prefix.size()));
    std::vector<std::pair<char32_t, double>> targets;
    std::size_t pos = 0;
    while (pos <= value.size()) {
      std::size_t end = value.find(',', pos);
      if (end == std::string::npos) end = value.size();
      const std::string item = value.substr(pos, end - pos);
      const auto colon = item.rfind(':');
      if (colon == std::string::npos) {
        throw DataError("config key '" + key + "': expected '<char>:<weight>'");
      }
      const std::string weight = item.substr(colon + 1);
      double w = 0.0;
      auto [p, ec] = std::from_chars(weight.data(), weight.data() + weight.size(), w);
      if (ec != std::errc() || p != weight.data() + weight.size() || weight.empty()) {
        throw DataError("config key '" + key + "': bad weight '" + weight + "'");
      }
      targets.emplace_back(single_char(key, item.substr(0, colon)), w);
      pos = end + 1;
    }
    m.confusions[src] = std::move(targets);
  }
  validate_model(m);
  return m;
}

LineHypothesis simulate_model_line(std::u32string_view gt, const ErrorModel& model,
                                   std::uint64_t seed, std::string model_id) {
  validate_model(model);
  if (gt.empty()) throw UsageError("cannot simulate an empty line");
  return Channel(model, seed).run(gt, std::move(model_id));
}

std::vector<std::vector<LineHypothesis>> simulate_ensemble(
    std::span<const std::u32string> gt_lines, std::span<const ErrorModel> models,
    std::uint64_t base_seed) {
  if (models.empty()) throw UsageError("ensemble needs at least one model");
  std::vector<std::vector<LineHypothesis>> out(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string id = "M" + std::to_string(i + 1);
    out[i].reserve(gt_lines.size());
    for (std::size_t l = 0; l < gt_lines.size(); ++l) {
      out[i].push_back(
          simulate_model_line(gt_lines[l], models[i], derive_seed(base_seed, i, l), id));
    }
  }
  return out;
}

std::vector<std::u32string> generate_text_lines(std::size_t count, std::uint64_t seed) {
  static constexpr const char32_t* kSyllables[] = {
      U"in",  U"de",  U"ma",  U"ri", U"en", U"na", U"men", U"qu", U"ae", U"est",
      U"con", U"ter", U"ius", U"sa", U"lu", U"ti", U"bus",  U"per", U"vo", U"ca",
      U"ro",  U"ne",  U"li",  U"ho", U"gra", U"fi", U"dem", U"xi", U"ply", U"zo",
      U"um",  U"ex",  U"ob",  U"je", U"kwa", U"tur"};
  constexpr std::size_t kCount = std::size(kSyllables);
  Rng rng(mix_seed(seed));
  std::vector<std::u32string> lines;
  lines.reserve(count);
  for (std::size_t l = 0; l < count; ++l) {
    const std::size_t target = 35 + uniform_below(rng, 26);
    std::u32string line;
    while (line.size() < target) {
      if (!line.empty()) line.push_back(U' ');
      const std::size_t syllables = 1 + uniform_below(rng, 3);
      for (std::size_t s = 0; s < syllables; ++s) {
        line += kSyllables[uniform_below(rng, kCount)];
      }
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace ocrvote
