#pragma once

// Plain-text graph format:
//
//   # comment
//   vertices: a b c
//   latent: h          (optional)
//   fixed: w           (optional)
//   a -> b
//   b <-> c

#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "admg/graph.hpp"

namespace admg {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(line == 0 ? what
                        : "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ParsedGraph {
  Cadmg graph;
  /// Vertices declared on the `latent:` line; still ordinary random vertices.
  VertexSet latent;
};

namespace detail {

inline bool is_label_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

class LineScanner {
 public:
  LineScanner(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }
  std::size_t column() const { return pos_ + 1; }

  std::string label() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected a vertex label");
    return std::string(text_.substr(start, pos_ - start));
  }

  /// Returns true for `<->`, false for `->`.
  bool arrow() {
    skip_space();
    if (text_.substr(pos_, 3) == "<->") {
      pos_ += 3;
      return true;
    }
    if (text_.substr(pos_, 2) == "->") {
      pos_ += 2;
      return false;
    }
    fail("expected '->' or '<->'");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, column()); }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline bool starts_with_header(std::string_view s, std::string_view key) {
  if (s.substr(0, key.size()) != key) return false;
  std::size_t i = key.size();
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i < s.size() && s[i] == ':';
}

}  // namespace detail

inline ParsedGraph parse_graph(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, Vertex> index;
  std::vector<std::string> latent_labels, fixed_labels;
  std::vector<Edge> directed, bidirected;

  enum class Stage { start, vertices, latent, fixed, edges } stage = Stage::start;
  std::string raw;
  std::size_t line_no = 0;

  auto header_labels = [](std::string_view body, std::size_t line) {
    std::vector<std::string> out;
    detail::LineScanner scan(body, line);
    while (!scan.done()) out.push_back(scan.label());
    return out;
  };
  std::unordered_set<std::uint64_t> seen_directed, seen_bidirected;
  auto key = [](const Edge& e) { return (static_cast<std::uint64_t>(e.from) << 32) | e.to; };

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t lead = 0;
    while (lead < line.size() && (line[lead] == ' ' || line[lead] == '\t')) ++lead;
    line = line.substr(lead);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    if (line.empty()) continue;

    auto body_after_colon = [&] { return line.substr(line.find(':') + 1); };

    if (detail::starts_with_header(line, "vertices")) {
      if (stage != Stage::start) throw ParseError("'vertices:' must be the first line", line_no, lead + 1);
      labels = header_labels(body_after_colon(), line_no);
      if (labels.empty()) throw ParseError("'vertices:' lists no vertices", line_no, lead + 1);
      for (const auto& l : labels) {
        if (!index.emplace(l, index.size()).second)
          throw ParseError("duplicate vertex '" + l + "'", line_no, lead + 1);
      }
      stage = Stage::vertices;
      continue;
    }
    if (stage == Stage::start) throw ParseError("expected 'vertices:' header", line_no, lead + 1);
    if (detail::starts_with_header(line, "latent")) {
      if (stage != Stage::vertices) throw ParseError("'latent:' out of order", line_no, lead + 1);
      latent_labels = header_labels(body_after_colon(), line_no);
      stage = Stage::latent;
      continue;
    }
    if (detail::starts_with_header(line, "fixed")) {
      if (stage != Stage::vertices && stage != Stage::latent)
        throw ParseError("'fixed:' out of order", line_no, lead + 1);
      fixed_labels = header_labels(body_after_colon(), line_no);
      stage = Stage::fixed;
      continue;
    }

    stage = Stage::edges;
    detail::LineScanner scan(line, line_no);
    auto endpoint = [&](const std::string& l, std::size_t col) {
      auto it = index.find(l);
      if (it == index.end()) throw ParseError("unknown vertex '" + l + "'", line_no, lead + col);
      return it->second;
    };
    std::size_t col_a = scan.column();
    std::string a = scan.label();
    bool bi = scan.arrow();
    scan.skip_space();
    std::size_t col_b = scan.column();
    std::string b = scan.label();
    if (!scan.done()) scan.fail("unexpected trailing characters");
    Vertex va = endpoint(a, col_a), vb = endpoint(b, col_b);
    if (va == vb) throw ParseError("self-loop on '" + a + "'", line_no, lead + col_a);
    Edge e{va, vb};
    if (bi) {
      if (e.from > e.to) std::swap(e.from, e.to);
      if (!seen_bidirected.insert(key(e)).second)
        throw ParseError("duplicate edge " + a + " <-> " + b, line_no, lead + col_a);
      bidirected.push_back(e);
    } else {
      if (!seen_directed.insert(key(e)).second)
        throw ParseError("duplicate edge " + a + " -> " + b, line_no, lead + col_a);
      directed.push_back(e);
    }
  }
  if (stage == Stage::start) throw ParseError("missing 'vertices:' header", 0, 0);

  auto resolve = [&](const std::vector<std::string>& ls, const char* what) {
    std::vector<Vertex> out;
    for (const auto& l : ls) {
      auto it = index.find(l);
      if (it == index.end()) throw ParseError(std::string(what) + " vertex '" + l + "' is not declared", 0, 0);
      out.push_back(it->second);
    }
    VertexSet s(out);
    if (s.size() != out.size()) throw ParseError(std::string("duplicate ") + what + " vertex", 0, 0);
    return s;
  };
  VertexSet latent = resolve(latent_labels, "latent");
  VertexSet fixed = resolve(fixed_labels, "fixed");
  if (latent.intersects(fixed)) throw ParseError("a vertex cannot be both latent and fixed", 0, 0);

  try {
    Admg g(std::move(labels), std::move(directed), std::move(bidirected));
    return ParsedGraph{Cadmg(std::move(g), fixed), latent};
  } catch (const GraphError& e) {
    throw ParseError(e.what(), 0, 0);
  }
}

inline ParsedGraph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_graph(in);
}

/// Writes vertices in declaration order; directed edges first, each group sorted by labels.
inline std::string serialize_graph(const Cadmg& cg, const VertexSet& latent = {}) {
  const Admg& g = cg.graph();
  std::ostringstream out;
  auto line = [&](const char* key, const VertexSet& s) {
    out << key << ':';
    for (Vertex v : s) out << ' ' << g.label(v);
    out << '\n';
  };
  line("vertices", g.all());
  if (!latent.empty()) line("latent", latent);
  if (!cg.fixed().empty()) line("fixed", cg.fixed());

  std::vector<std::pair<std::string, std::string>> d, b;
  for (const Edge& e : g.directed_edges()) d.emplace_back(g.label(e.from), g.label(e.to));
  for (const Edge& e : g.bidirected_edges()) {
    auto x = g.label(e.from), y = g.label(e.to);
    if (y < x) std::swap(x, y);
    b.emplace_back(x, y);
  }
  std::sort(d.begin(), d.end());
  std::sort(b.begin(), b.end());
  for (const auto& [x, y] : d) out << x << " -> " << y << '\n';
  for (const auto& [x, y] : b) out << x << " <-> " << y << '\n';
  return out.str();
}

inline std::string serialize_graph(const Admg& g, const VertexSet& latent = {}) {
  return serialize_graph(Cadmg(g), latent);
}

inline std::string join_labels(const Admg& g, const VertexSet& s, std::string_view sep = " ") {
  std::string out;
  for (Vertex v : s) {
    if (!out.empty()) out += sep;
    out += g.label(v);
  }
  return out;
}

}  // namespace admg
