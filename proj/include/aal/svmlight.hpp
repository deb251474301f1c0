#pragma once

// svmlight-style text format: "label idx:val idx:val ... [# comment]".
// Labels +1 / 1 map to +1 and -1 / 0 to -1. Raw feature indices are remapped
// to dense ranks 0..d-1 (order preserving); the raw indices are kept in
// Dataset::raw_index.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aal/core.hpp"

namespace aal {

struct ParseError : std::runtime_error {
  std::size_t line;
  ParseError(std::size_t line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct SvmDataset {
  std::vector<StreamExample<SparseVector>> examples;
  std::vector<std::uint64_t> raw_index;  ///< dense index -> index in the file
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline Label parse_label(std::string_view tok, std::size_t line) {
  if (tok == "+1" || tok == "1") return Label::pos();
  if (tok == "-1" || tok == "0") return Label::neg();
  throw ParseError(line, "unknown label '" + std::string(tok) + "'");
}

inline double parse_double(std::string_view tok, std::size_t line) {
  // from_chars rejects a leading '+'
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) throw ParseError(line, "bad value '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

inline SvmDataset read_svmlight(std::istream& in) {
  struct Raw {
    std::vector<std::pair<std::uint64_t, double>> entries;
    Label y;
  };
  std::vector<Raw> rows;
  std::vector<std::uint64_t> seen;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    std::string_view line(buf);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    std::size_t pos = line.find_first_of(" \t");
    Raw row{{}, detail::parse_label(line.substr(0, pos), line_no)};
    while (pos != std::string_view::npos) {
      const std::size_t start = line.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      pos = line.find_first_of(" \t", start);
      const auto tok = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      std::uint64_t idx = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc{} || p != tok.data() + colon) throw ParseError(line_no, "bad index '" + std::string(tok) + "'");
      if (!row.entries.empty() && idx <= row.entries.back().first)
        throw ParseError(line_no, "feature indices must be strictly increasing");
      const double v = detail::parse_double(tok.substr(colon + 1), line_no);
      if (!std::isfinite(v)) throw ParseError(line_no, "non-finite feature value");
      if (v != 0.0) {
        row.entries.emplace_back(idx, v);
        seen.push_back(idx);
      }
    }
    rows.push_back(std::move(row));
    if (seen.size() > (1u << 20)) {  // keep the index set from growing with the file
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    }
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

  std::unordered_map<std::uint64_t, SparseVector::index_type> rank;
  rank.reserve(seen.size());
  for (std::size_t i = 0; i < seen.size(); ++i) rank.emplace(seen[i], static_cast<SparseVector::index_type>(i));

  SvmDataset out;
  out.raw_index = std::move(seen);
  out.examples.reserve(rows.size());
  for (auto& r : rows) {
    std::vector<SparseVector::entry> e;
    e.reserve(r.entries.size());
    for (auto [idx, v] : r.entries) e.emplace_back(rank.at(idx), v);
    out.examples.emplace_back(SparseVector(std::move(e)), r.y);
    r.entries = {};
  }
  return out;
}

inline SvmDataset read_svmlight(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_svmlight(in);
}

/// Writes 1-based indices (or raw_index[i] when given) with shortest round-trip values.
inline void write_svmlight(std::ostream& out, std::span<const StreamExample<SparseVector>> examples,
                           std::span<const std::uint64_t> raw_index = {}) {
  char num[64];
  for (const auto& ex : examples) {
    out << (LabelChannel::reveal(ex).is_pos() ? "+1" : "-1");
    for (const auto& [i, v] : ex.features().entries()) {
      const std::uint64_t idx = raw_index.empty() ? std::uint64_t{i} + 1 : raw_index[i];
      auto [p, ec] = std::to_chars(num, num + sizeof num, v);
      out << ' ' << idx << ':' << std::string_view(num, static_cast<std::size_t>(p - num));
    }
    out << '\n';
  }
}

}  // namespace aal
