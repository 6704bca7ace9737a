#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "kite/dataset.hpp"
#include "kite/discrete.hpp"
#include "kite/graph.hpp"

namespace kite {

// Shortest decimal form that parses back to the same double; infinities
// print as "inf"/"-inf".
inline std::string format_double(double value) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, end);
}

inline double parse_double(std::string_view token, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string(what) + ": bad numeric token '" +
                                std::string(token) + "'");
  }
  return value;
}

// Whole-file write through a sibling temporary plus rename, so a crash or
// error never leaves a half-written artifact behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("atomic_write: short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("atomic_write: cannot rename onto " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_file: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t stop = line.find(sep, start);
    if (stop == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, stop - start));
    start = stop + 1;
  }
}

inline std::vector<std::string_view> nonempty_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    auto line = text.substr(start, stop - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = stop + 1;
  }
  return lines;
}

inline std::string dataset_header(int d) {
  std::string header;
  for (int j = 0; j < d; ++j) {
    if (j > 0) header += ',';
    header += 'X';
    header += std::to_string(j);
  }
  return header;
}

}  // namespace detail

inline void write_continuous_csv(const std::filesystem::path& path,
                                 const ContinuousDataset& data) {
  std::string out = detail::dataset_header(data.d);
  out += '\n';
  for (int k = 0; k < data.n; ++k) {
    for (int j = 0; j < data.d; ++j) {
      if (j > 0) out += ',';
      out += format_double(data.at(k, j));
    }
    out += '\n';
  }
  atomic_write(path, out);
}

inline ContinuousDataset read_continuous_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = detail::nonempty_lines(text);
  if (lines.empty()) throw std::invalid_argument("read_continuous_csv: empty file");
  if (lines[0].rfind("# alphabet=", 0) == 0) {
    throw std::invalid_argument("read_continuous_csv: file holds a discrete dataset");
  }
  if (lines[0].rfind("X0", 0) != 0) {
    throw std::invalid_argument("read_continuous_csv: missing X0.. header row");
  }
  const int d = static_cast<int>(detail::split(lines[0], ',').size());
  const int n = static_cast<int>(lines.size()) - 1;
  if (n < 1) throw std::invalid_argument("read_continuous_csv: no data rows");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = detail::split(lines[r], ',');
    if (static_cast<int>(fields.size()) != d) {
      throw std::invalid_argument("read_continuous_csv: ragged row");
    }
    for (const auto field : fields) values.push_back(parse_double(field, "read_continuous_csv"));
  }
  return ContinuousDataset(n, d, std::move(values));
}

inline void write_discrete_csv(const std::filesystem::path& path, const DiscreteDataset& data) {
  std::string out = "# alphabet=" + std::to_string(data.alphabet) + "\n";
  out += detail::dataset_header(data.d);
  out += '\n';
  for (int k = 0; k < data.n; ++k) {
    for (int j = 0; j < data.d; ++j) {
      if (j > 0) out += ',';
      out += std::to_string(data.at(k, j));
    }
    out += '\n';
  }
  atomic_write(path, out);
}

inline DiscreteDataset read_discrete_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = detail::nonempty_lines(text);
  if (lines.size() < 3 || lines[0].rfind("# alphabet=", 0) != 0) {
    throw std::invalid_argument("read_discrete_csv: missing '# alphabet=' header");
  }
  const auto alphabet_token = lines[0].substr(std::string_view("# alphabet=").size());
  int alphabet = 0;
  {
    const auto [ptr, ec] = std::from_chars(
        alphabet_token.data(), alphabet_token.data() + alphabet_token.size(), alphabet);
    if (ec != std::errc() || ptr != alphabet_token.data() + alphabet_token.size()) {
      throw std::invalid_argument("read_discrete_csv: bad alphabet size");
    }
  }
  const int d = static_cast<int>(detail::split(lines[1], ',').size());
  const int n = static_cast<int>(lines.size() - 2);
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (std::size_t r = 2; r < lines.size(); ++r) {
    const auto fields = detail::split(lines[r], ',');
    if (static_cast<int>(fields.size()) != d) {
      throw std::invalid_argument("read_discrete_csv: ragged row");
    }
    for (const auto field : fields) {
      int cell = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), cell);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw std::invalid_argument("read_discrete_csv: non-integer cell '" +
                                    std::string(field) + "'");
      }
      cells.push_back(cell);
    }
  }
  return DiscreteDataset(n, d, alphabet, std::move(cells));
}

inline void write_metric_csv(const std::filesystem::path& path, const MetricMatrix& metric) {
  std::string out;
  const int d = metric.dim();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (j > 0) out += ',';
      out += format_double(metric.at(i, j));
    }
    out += '\n';
  }
  atomic_write(path, out);
}

inline MetricMatrix read_metric_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = detail::nonempty_lines(text);
  const int d = static_cast<int>(lines.size());
  if (d < 1) throw std::invalid_argument("read_metric_csv: empty file");
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(d));
  for (const auto line : lines) {
    const auto fields = detail::split(line, ',');
    if (static_cast<int>(fields.size()) != d) {
      throw std::invalid_argument("read_metric_csv: matrix is not square");
    }
    auto& row = rows.emplace_back();
    row.reserve(static_cast<std::size_t>(d));
    for (const auto field : fields) row.push_back(parse_double(field, "read_metric_csv"));
  }
  MetricMatrix metric(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double value = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double mirror = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (!(value == mirror)) {
        throw std::invalid_argument("read_metric_csv: matrix is not symmetric");
      }
      metric.set(i, j, value);
    }
  }
  return metric;
}

inline void write_edge_list(const std::filesystem::path& path, const Graph& graph) {
  std::string out = "# d=" + std::to_string(graph.dim()) + "\n";
  for (const auto& [i, j] : graph.edges()) {
    out += std::to_string(i);
    out += ' ';
    out += std::to_string(j);
    out += '\n';
  }
  atomic_write(path, out);
}

inline Graph read_edge_list(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = detail::nonempty_lines(text);
  if (lines.empty() || lines[0].rfind("# d=", 0) != 0) {
    throw std::invalid_argument("read_edge_list: missing '# d=' header");
  }
  const auto dim_token = lines[0].substr(4);
  int d = 0;
  {
    const auto [ptr, ec] =
        std::from_chars(dim_token.data(), dim_token.data() + dim_token.size(), d);
    if (ec != std::errc() || ptr != dim_token.data() + dim_token.size()) {
      throw std::invalid_argument("read_edge_list: bad dimension");
    }
  }
  Graph graph(d);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    std::istringstream row{std::string(lines[r])};
    int i = 0, j = 0;
    if (!(row >> i >> j)) throw std::invalid_argument("read_edge_list: bad edge row");
    graph.add_edge(i, j);
  }
  return graph;
}

}  // namespace kite
