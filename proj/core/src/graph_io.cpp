#include "kcut/graph_io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>
#include <vector>

namespace kcut {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long parse_int(std::string_view f, int line, const char* what) {
  long long v = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size()) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" +
                               std::string(f) + "'");
  }
  return v;
}

double parse_weight(std::string_view f, int line) {
  // from_chars for doubles is missing in some libstdc++ versions; strtod on
  // a bounded copy keeps the error handling exact.
  std::string buf(f);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) {
    throw ParseError(line, "expected numeric weight, got '" + buf + "'");
  }
  return v;
}

WeightedGraph parse_impl(std::istream& in, bool weight_optional,
                         bool allow_index_comment) {
  std::string raw;
  int lineno = 0;
  bool zero_indexed = false;

  auto next_fields = [&](std::vector<std::string_view>& fields) {
    while (std::getline(in, raw)) {
      ++lineno;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (allow_index_comment && lineno == 1 && !raw.empty() && raw[0] == '#') {
        const auto f = split_fields(std::string_view(raw).substr(1));
        if (f.size() == 1 && f[0] == "zero-indexed") {
          zero_indexed = true;
          continue;
        }
        throw ParseError(lineno, "unrecognized comment header");
      }
      fields = split_fields(raw);
      if (!fields.empty()) return true;
    }
    return false;
  };

  std::vector<std::string_view> fields;
  if (!next_fields(fields)) {
    throw ParseError(lineno + 1, "missing header line");
  }
  if (fields.size() != 2) {
    throw ParseError(lineno, "malformed header, expected 'n m'");
  }
  const long long n = parse_int(fields[0], lineno, "n");
  const long long m = parse_int(fields[1], lineno, "m");
  if (n < 1) throw ParseError(lineno, "header requires n >= 1");
  if (m < 0) throw ParseError(lineno, "header requires m >= 0");

  const long long lo = zero_indexed ? 0 : 1;
  std::vector<WeightedGraph::Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(m) * 2);

  for (long long k = 0; k < m; ++k) {
    if (!next_fields(fields)) {
      throw ParseError(lineno + 1, "unexpected end of input, expected " +
                                       std::to_string(m) + " edges, got " +
                                       std::to_string(k));
    }
    const bool has_w = fields.size() == 3;
    if (!(has_w || (weight_optional && fields.size() == 2))) {
      throw ParseError(lineno, weight_optional
                                   ? "expected 'i j' or 'i j w'"
                                   : "expected 'i j w'");
    }
    const long long i = parse_int(fields[0], lineno, "endpoint i");
    const long long j = parse_int(fields[1], lineno, "endpoint j");
    if (i < lo || i >= lo + n || j < lo || j >= lo + n) {
      throw ParseError(lineno, "endpoint out of range [" + std::to_string(lo) +
                                   ", " + std::to_string(lo + n - 1) + "]");
    }
    if (i == j) throw ParseError(lineno, "self-loop");
    const double w = has_w ? parse_weight(fields[2], lineno) : 1.0;
    int u = static_cast<int>(i - lo), v = static_cast<int>(j - lo);
    if (u > v) std::swap(u, v);
    const std::uint64_t key =
        static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) + v;
    if (!seen.insert(key).second) throw ParseError(lineno, "duplicate edge");
    edges.push_back({u, v, w});
  }
  if (next_fields(fields)) {
    throw ParseError(lineno, "trailing content after " + std::to_string(m) +
                                 " edges");
  }
  WeightedGraph g;
  g.n = static_cast<int>(n);
  g.edges = std::move(edges);
  return g;
}

WeightedGraph parse_path(const std::string& path, bool weight_optional,
                         bool allow_index_comment) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  return parse_impl(in, weight_optional, allow_index_comment);
}

} // namespace

WeightedGraph parse_gset(std::istream& in) { return parse_impl(in, false, false); }

WeightedGraph parse_gset(const std::string& text) {
  std::istringstream in(text);
  return parse_gset(in);
}

WeightedGraph parse_gset_file(const std::string& path) {
  return parse_path(path, false, false);
}

WeightedGraph parse_edge_list(std::istream& in) {
  return parse_impl(in, true, true);
}

WeightedGraph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

WeightedGraph parse_edge_list_file(const std::string& path) {
  return parse_path(path, true, true);
}

void write_gset(std::ostream& out, const WeightedGraph& g) {
  out << g.n << ' ' << g.m() << '\n';
  for (const auto& e : g.edges) {
    out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.w << '\n';
  }
}

} // namespace kcut
