#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpmis/graph.hpp"

namespace dpmis {

/// Malformed input text; `line()` is 1-based (0 when not tied to a line).
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline long long parse_int(std::string_view tok, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace detail

/// Reads the DIMACS edge format: `c` comments, one `p edge <n> <m>` header,
/// then `e <u> <v>` lines with 1-based ids. The header edge count is informative only.
inline Graph parse_graph(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  std::optional<std::size_t> n;
  std::vector<Edge> edges;
  while (std::getline(in, raw)) {
    ++line;
    auto tok = detail::split_ws(raw);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] == "p") {
      if (n) throw FormatError(line, "duplicate header");
      if (tok.size() != 4 || tok[1] != "edge") {
        throw FormatError(line, "malformed header, expected 'p edge <n> <m>'");
      }
      long long nv = detail::parse_int(tok[2], line);
      long long ne = detail::parse_int(tok[3], line);
      if (nv < 0 || ne < 0) throw FormatError(line, "negative count in header");
      n = static_cast<std::size_t>(nv);
      edges.reserve(static_cast<std::size_t>(ne));
    } else if (tok[0] == "e") {
      if (!n) throw FormatError(line, "edge line before 'p edge' header");
      if (tok.size() != 3) throw FormatError(line, "malformed edge line, expected 'e <u> <v>'");
      long long u = detail::parse_int(tok[1], line);
      long long v = detail::parse_int(tok[2], line);
      for (long long id : {u, v}) {
        if (id < 1 || id > static_cast<long long>(*n)) {
          throw FormatError(line, "vertex id " + std::to_string(id) + " outside 1.." +
                                      std::to_string(*n));
        }
      }
      if (u == v) throw FormatError(line, "self-loop on vertex " + std::to_string(u));
      edges.emplace_back(static_cast<VertexId>(u - 1), static_cast<VertexId>(v - 1));
    } else {
      throw FormatError(line, "unknown line type '" + std::string(tok[0]) + "'");
    }
  }
  if (!n) throw FormatError(0, "missing 'p edge' header");
  return Graph(*n, edges);
}

inline Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

/// Canonical form: header, then each edge once with u < v in lexicographic order.
inline void write_graph(std::ostream& out, const Graph& g) {
  out << "p edge " << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& [u, v] : g.edges()) out << "e " << u + 1 << ' ' << v + 1 << '\n';
}

inline std::string write_graph(const Graph& g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  try {
    return parse_graph(in);
  } catch (const FormatError& e) {
    throw FormatError(e.line(), path + ": " + e.what());
  }
}

inline void save_graph(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file '" + path + "'");
  write_graph(out, g);
}

/// Solution file: `s <size>` then one 1-based vertex id per line.
inline void write_solution(std::ostream& out, const VertexSet& s) {
  out << "s " << s.size() << '\n';
  for (VertexId v : s.members) out << v + 1 << '\n';
}

inline VertexSet read_solution(std::istream& in, SetKind kind) {
  std::string raw;
  std::size_t line = 0;
  std::optional<std::size_t> declared;
  std::vector<VertexId> ids;
  while (std::getline(in, raw)) {
    ++line;
    auto tok = detail::split_ws(raw);
    if (tok.empty()) continue;
    if (tok[0] == "s") {
      if (tok.size() != 2) throw FormatError(line, "malformed size line");
      declared = static_cast<std::size_t>(detail::parse_int(tok[1], line));
      continue;
    }
    if (!declared) throw FormatError(line, "vertex before 's <size>' line");
    long long id = detail::parse_int(tok[0], line);
    if (id < 1) throw FormatError(line, "vertex ids are 1-based");
    ids.push_back(static_cast<VertexId>(id - 1));
  }
  if (!declared) throw FormatError(0, "missing 's <size>' line");
  VertexSet s(std::move(ids), kind);
  if (s.size() != *declared) {
    throw FormatError(0, "declared size " + std::to_string(*declared) + " but found " +
                             std::to_string(s.size()) + " distinct vertices");
  }
  return s;
}

}  // namespace dpmis
