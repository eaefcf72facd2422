///////////////////////////////////////////////////////////////////////
// File:        alignment.cpp
// Description: Pairwise and pivot-based multiple alignment.
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

#include "ocrvote/alignment.hpp"

#include <algorithm>
#include <tuple>
#include <utility>

#include "ocrvote/evaluation.hpp"
#include "ocrvote/utf8.hpp"

namespace ocrvote {
namespace {

using Index = std::optional<std::size_t>;

// Column pairs (index into a, index into b) of a minimal alignment.
std::vector<std::pair<Index, Index>> trace_pair(std::u32string_view a,
                                                std::u32string_view b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t width = m + 1;
  std::vector<std::size_t> cost((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return cost[i * width + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  std::vector<std::pair<Index, Index>> cols;
  cols.reserve(n + m);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = at(i, j);
    if (i > 0 && j > 0 && a[i - 1] == b[j - 1] && at(i - 1, j - 1) == here) {
      cols.emplace_back(i - 1, j - 1);
      --i, --j;
    } else if (i > 0 && j > 0 && at(i - 1, j - 1) + 1 == here) {
      cols.emplace_back(i - 1, j - 1);
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      cols.emplace_back(i - 1, std::nullopt);
      --i;
    } else {
      cols.emplace_back(std::nullopt, j - 1);
      --j;
    }
  }
  std::reverse(cols.begin(), cols.end());
  return cols;
}

}  // namespace

bool AlignedSet::unanimous(std::size_t column) const {
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][column] != rows[0][column]) return false;
  }
  return true;
}

AlignedSet align_pair(std::u32string_view a, std::u32string_view b) {
  AlignedSet set;
  set.rows.resize(2);
  set.col_to_index.resize(2);
  for (const auto& [ia, ib] : trace_pair(a, b)) {
    set.rows[0].push_back(ia ? a[*ia] : kGap);
    set.rows[1].push_back(ib ? b[*ib] : kGap);
    set.col_to_index[0].push_back(ia);
    set.col_to_index[1].push_back(ib);
  }
  return set;
}

std::size_t choose_pivot(std::span<const std::u32string> texts) {
  const std::size_t n = texts.size();
  std::vector<std::size_t> total(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t d = edit_distance(texts[i], texts[j]);
      total[i] += d;
      total[j] += d;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const auto key = [&](std::size_t k) {
      return std::tuple(total[k], texts[k].size(), std::u32string_view(texts[k]));
    };
    if (key(i) < key(best)) best = i;
  }
  return best;
}

AlignedSet align_many(std::span<const std::u32string> texts) {
  AlignedSet set;
  const std::size_t n = texts.size();
  if (n == 0) return set;
  const std::size_t pivot = choose_pivot(texts);
  const std::u32string& ref = texts[pivot];
  const std::size_t slots = ref.size() + 1;

  // Per input: characters inserted before pivot position s, and the
  // character aligned to pivot position p.
  std::vector<std::vector<std::vector<std::size_t>>> inserted(
      n, std::vector<std::vector<std::size_t>>(slots));
  std::vector<std::vector<Index>> matched(n, std::vector<Index>(ref.size()));
  for (std::size_t k = 0; k < n; ++k) {
    if (k == pivot) {
      for (std::size_t p = 0; p < ref.size(); ++p) matched[k][p] = p;
      continue;
    }
    std::size_t slot = 0;
    for (const auto& [ip, ik] : trace_pair(ref, texts[k])) {
      if (ip) {
        matched[k][*ip] = ik;
        slot = *ip + 1;
      } else {
        inserted[k][slot].push_back(*ik);
      }
    }
  }

  std::vector<std::size_t> width(slots, 0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t s = 0; s < slots; ++s) {
      width[s] = std::max(width[s], inserted[k][s].size());
    }
  }

  set.rows.resize(n);
  set.col_to_index.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& row = set.rows[k];
    auto& map = set.col_to_index[k];
    auto put = [&](Index idx) {
      row.push_back(idx ? texts[k][*idx] : kGap);
      map.push_back(idx);
    };
    for (std::size_t s = 0; s < slots; ++s) {
      const auto& ins = inserted[k][s];
      for (std::size_t c = 0; c < width[s]; ++c) {
        put(c < ins.size() ? Index(ins[c]) : std::nullopt);
      }
      if (s < ref.size()) put(matched[k][s]);
    }
  }
  return set;
}

AlignedSet align_many(std::span<const LineHypothesis> hyps) {
  std::vector<std::u32string> texts;
  texts.reserve(hyps.size());
  for (const auto& h : hyps) texts.push_back(h.text);
  return align_many(texts);
}

std::vector<Disagreement> extract_disagreements(
    const AlignedSet& set, std::span<const LineHypothesis> hyps) {
  std::vector<Disagreement> regions;
  const std::size_t cols = set.columns();
  std::size_t c = 0;
  while (c < cols) {
    if (set.unanimous(c)) {
      ++c;
      continue;
    }
    Disagreement region;
    region.id = static_cast<int>(regions.size()) + 1;
    region.col_begin = c;
    while (c < cols && !set.unanimous(c)) ++c;
    region.col_end = c;

    region.per_input.resize(set.rows.size());
    for (std::size_t r = 0; r < set.rows.size(); ++r) {
      RegionInput& input = region.per_input[r];
      const LineHypothesis& hyp = hyps[r];
      input.has_llocs = hyp.has_llocs();
      bool first = true;
      for (std::size_t col = region.col_begin; col < region.col_end; ++col) {
        const Index idx = set.col_to_index[r][col];
        if (!idx) continue;
        if (first) input.first_index = *idx;
        first = false;
        input.text.push_back(hyp.text[*idx]);
        if (!hyp.entries.empty()) input.entries.push_back(hyp.entries[*idx]);
      }
      if (first) {
        // Empty contribution: anchor at the next character of this row.
        std::size_t next = 0;
        for (std::size_t col = 0; col < region.col_begin; ++col) {
          if (set.col_to_index[r][col]) next = *set.col_to_index[r][col] + 1;
        }
        input.first_index = next;
      }
    }
    regions.push_back(std::move(region));
  }
  return regions;
}

std::string render_aligned_line(const AlignedSet& set,
                                std::span<const Disagreement> regions) {
  std::string line;
  std::size_t c = 0;
  auto next_region = regions.begin();
  while (c < set.columns()) {
    if (next_region != regions.end() && next_region->col_begin == c) {
      line += "{" + std::to_string(next_region->id) + "}";
      c = next_region->col_end;
      ++next_region;
      continue;
    }
    if (set.rows[0][c] != kGap) line += encode_utf8(set.rows[0][c]);
    ++c;
  }
  return line;
}

std::string render_alignment(const AlignedSet& set,
                             std::span<const Disagreement> regions) {
  std::vector<std::string> lines;
  lines.push_back("Aligned: " + render_aligned_line(set, regions));
  for (const Disagreement& region : regions) {
    std::string listing = "{" + std::to_string(region.id) + "}: ";
    for (std::size_t r = 0; r < region.per_input.size(); ++r) {
      if (r > 0) listing += ", ";
      listing += "M" + std::to_string(r + 1) + "{" +
                 encode_utf8(region.per_input[r].text) + "}";
    }
    lines.push_back(std::move(listing));
  }

  std::string out = lines.front() + "\n";
  if (regions.empty()) return out;
  std::size_t width = 0;
  for (const auto& l : lines) width = std::max(width, decode_utf8(l).size());
  out += std::string(width, '-') + "\n";
  for (std::size_t i = 1; i < lines.size(); ++i) out += lines[i] + "\n";
  return out;
}

}  // namespace ocrvote
