///////////////////////////////////////////////////////////////////////
// File:        llocs.cpp
// Description: Extended llocs parsing and writing.
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

#include "ocrvote/llocs.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ocrvote/error.hpp"
#include "ocrvote/utf8.hpp"

namespace ocrvote {
namespace {

bool valid_conf(double c) { return c > 0.0 && c <= 1.0; }

std::string escape_char(char32_t ch) {
  switch (ch) {
    case U'\t': return "\\t";
    case U'\n': return "\\n";
    case U'\\': return "\\\\";
    case U';': return "\\;";
    case U'=': return "\\=";
    default: return encode_utf8(ch);
  }
}

// Reads one (possibly escaped) character from `s` starting at `pos`.
char32_t read_char(const std::u32string& s, std::size_t& pos,
                   std::size_t line) {
  if (pos >= s.size()) throw ParseError(line, "missing character");
  char32_t ch = s[pos++];
  if (ch != U'\\') return ch;
  if (pos >= s.size()) throw ParseError(line, "dangling escape");
  switch (s[pos++]) {
    case U't': return U'\t';
    case U'n': return U'\n';
    case U'\\': return U'\\';
    case U';': return U';';
    case U'=': return U'=';
    default: throw ParseError(line, "unknown escape sequence");
  }
}

template <typename T>
T read_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError(line, std::string("malformed ") + what + " '" +
                               std::string(field) + "'");
  }
  return value;
}

double read_conf(std::string_view field, std::size_t line) {
  const double conf = read_number<double>(field, line, "confidence");
  if (!valid_conf(conf)) {
    throw ParseError(line, "confidence out of range: " + std::string(field));
  }
  return conf;
}

std::vector<Alternative> read_alternatives(const std::u32string& field,
                                           std::size_t line) {
  std::vector<Alternative> alts;
  std::size_t pos = 0;
  while (pos < field.size()) {
    Alternative alt;
    alt.ch = read_char(field, pos, line);
    if (pos >= field.size() || field[pos] != U'=') {
      throw ParseError(line, "alternative without '='");
    }
    ++pos;
    const std::size_t end = std::min(field.find(U';', pos), field.size());
    alt.conf = read_conf(encode_utf8(field.substr(pos, end - pos)), line);
    alts.push_back(alt);
    pos = end;
    if (pos < field.size()) {
      ++pos;
      if (pos == field.size()) throw ParseError(line, "trailing ';'");
    }
  }
  return alts;
}

LlocsEntry parse_record(std::string_view record, std::size_t line) {
  const std::u32string text = [&] {
    try {
      return decode_utf8(record);
    } catch (const DataError& e) {
      throw ParseError(line, e.what());
    }
  }();

  std::size_t pos = 0;
  LlocsEntry entry;
  entry.ch = read_char(text, pos, line);

  std::vector<std::u32string> fields;
  while (pos < text.size()) {
    if (text[pos] != U'\t') throw ParseError(line, "expected TAB after field");
    ++pos;
    const std::size_t end = std::min(text.find(U'\t', pos), text.size());
    fields.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  if (fields.size() != 4) {
    throw ParseError(line, "expected 5 TAB-separated fields, got " +
                               std::to_string(fields.size() + 1));
  }
  entry.x_start = read_number<int>(encode_utf8(fields[0]), line, "x_start");
  entry.x_end = read_number<int>(encode_utf8(fields[1]), line, "x_end");
  entry.conf = read_conf(encode_utf8(fields[2]), line);
  entry.alternatives = read_alternatives(fields[3], line);
  std::stable_sort(entry.alternatives.begin(), entry.alternatives.end(),
                   [](const Alternative& a, const Alternative& b) {
                     return a.conf > b.conf;
                   });
  try {
    validate_entry(entry);
  } catch (const DataError& e) {
    throw ParseError(line, e.what());
  }
  return entry;
}

}  // namespace

LineHypothesis make_hypothesis(std::vector<LlocsEntry> entries,
                               std::string model_id) {
  LineHypothesis hyp;
  hyp.text.reserve(entries.size());
  for (const auto& e : entries) hyp.text.push_back(e.ch);
  hyp.entries = std::move(entries);
  hyp.model_id = std::move(model_id);
  return hyp;
}

LineHypothesis make_text_hypothesis(std::u32string text, std::string model_id) {
  LineHypothesis hyp;
  hyp.text = std::move(text);
  hyp.model_id = std::move(model_id);
  return hyp;
}

void validate_entry(const LlocsEntry& entry) {
  if (entry.x_start < 0) throw DataError("negative x_start");
  if (entry.x_start > entry.x_end) throw DataError("x_start > x_end");
  if (!valid_conf(entry.conf)) throw DataError("confidence out of range");
  for (std::size_t i = 0; i < entry.alternatives.size(); ++i) {
    const Alternative& alt = entry.alternatives[i];
    if (!valid_conf(alt.conf)) {
      throw DataError("alternative confidence out of range");
    }
    if (alt.ch == entry.ch) {
      throw DataError("alternative duplicates the recognized character");
    }
    if (i > 0 && entry.alternatives[i - 1].conf < alt.conf) {
      throw DataError("alternatives not sorted by descending confidence");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (entry.alternatives[j].ch == alt.ch) {
        throw DataError("duplicate alternative character");
      }
    }
  }
}

void validate_hypothesis(const LineHypothesis& hyp) {
  if (hyp.entries.empty()) return;
  if (hyp.entries.size() != hyp.text.size()) {
    throw DataError("llocs entry count does not match text length");
  }
  for (std::size_t i = 0; i < hyp.entries.size(); ++i) {
    validate_entry(hyp.entries[i]);
    if (hyp.entries[i].ch != hyp.text[i]) {
      throw DataError("llocs characters do not spell the text");
    }
    if (i > 0 && hyp.entries[i].x_start < hyp.entries[i - 1].x_start) {
      throw DataError("x_start not monotone");
    }
  }
}

LineHypothesis parse_llocs(std::string_view raw, std::string model_id) {
  std::vector<LlocsEntry> entries;
  std::size_t line = 0;
  std::size_t begin = 0;
  while (begin <= raw.size()) {
    std::size_t end = raw.find('\n', begin);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view record = raw.substr(begin, end - begin);
    ++line;
    if (!record.empty() && record.back() == '\r') record.remove_suffix(1);
    if (!record.empty()) {
      LlocsEntry entry = parse_record(record, line);
      if (!entries.empty() && entry.x_start < entries.back().x_start) {
        throw ParseError(line, "x_start not monotone");
      }
      entries.push_back(std::move(entry));
    }
    begin = end + 1;
  }
  return make_hypothesis(std::move(entries), std::move(model_id));
}

std::string format_confidence(double conf) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", conf);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string write_llocs(const LineHypothesis& hyp) {
  std::string out;
  for (const LlocsEntry& e : hyp.entries) {
    out += escape_char(e.ch);
    out += '\t';
    out += std::to_string(e.x_start);
    out += '\t';
    out += std::to_string(e.x_end);
    out += '\t';
    out += format_confidence(e.conf);
    out += '\t';
    bool first = true;
    for (const Alternative& alt : e.alternatives) {
      if (alt.conf < kAlternativeStorageFloor) continue;
      if (!first) out += ';';
      first = false;
      out += escape_char(alt.ch);
      out += '=';
      out += format_confidence(alt.conf);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path with_suffix(const std::filesystem::path& stem,
                                  const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace

LineHypothesis load_hypothesis(const std::filesystem::path& stem,
                               std::string model_id) {
  const auto txt_path = with_suffix(stem, ".txt");
  const auto llocs_path = with_suffix(stem, ".llocs");
  const bool has_txt = std::filesystem::exists(txt_path);
  const bool has_llocs = std::filesystem::exists(llocs_path);
  if (!has_txt && !has_llocs) {
    throw DataError("no .txt or .llocs for " + stem.string());
  }

  std::u32string text;
  if (has_txt) {
    std::string raw = slurp(txt_path);
    raw = raw.substr(0, raw.find('\n'));
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    text = decode_utf8(raw);
  }
  if (!has_llocs) return make_text_hypothesis(std::move(text), std::move(model_id));

  LineHypothesis hyp;
  try {
    hyp = parse_llocs(slurp(llocs_path), std::move(model_id));
  } catch (const ParseError& e) {
    throw DataError(llocs_path.string() + ": " + e.what());
  }
  if (has_txt && hyp.text != text) {
    throw DataError(llocs_path.string() + ": text does not match " +
                    txt_path.string());
  }
  return hyp;
}

void save_hypothesis(const std::filesystem::path& stem,
                     const LineHypothesis& hyp) {
  {
    std::ofstream out(with_suffix(stem, ".txt"), std::ios::binary);
    if (!out) throw DataError("cannot write " + stem.string() + ".txt");
    out << encode_utf8(hyp.text) << '\n';
  }
  if (!hyp.entries.empty()) {
    std::ofstream out(with_suffix(stem, ".llocs"), std::ios::binary);
    if (!out) throw DataError("cannot write " + stem.string() + ".llocs");
    out << write_llocs(hyp);
  }
}

}  // namespace ocrvote
