#pragma once

// Exact discrete kernels q(x_V | x_W), kernel fixing and the nested Markov check.

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <istream>
#include <set>
#include <unordered_map>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "admg/fixing.hpp"
#include "admg/graph.hpp"

namespace admg {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// Tables larger than this many atoms are refused.
inline constexpr std::size_t kMaxKernelAtoms = std::size_t{1} << 22;

/// A table over every variable (random and fixed) in mixed radix, the first
/// variable most significant. Entry x holds q(x_random | x_fixed).
class DiscreteKernel {
 public:
  DiscreteKernel() = default;
  DiscreteKernel(std::vector<std::string> names, std::vector<std::size_t> cards, std::vector<char> fixed,
                 std::vector<Rational> table)
      : names_(std::move(names)), cards_(std::move(cards)), fixed_(std::move(fixed)), table_(std::move(table)) {
    if (names_.size() != cards_.size() || names_.size() != fixed_.size())
      throw Error("kernel: variable lists have different lengths");
    strides_.assign(names_.size(), 1);
    std::size_t atoms = 1;
    for (std::size_t i = names_.size(); i-- > 0;) {
      if (cards_[i] == 0) throw Error("kernel: variable '" + names_[i] + "' has no states");
      strides_[i] = atoms;
      if (atoms > kMaxKernelAtoms / cards_[i]) throw SizeGuardError("kernel: table exceeds the size guard");
      atoms *= cards_[i];
    }
    if (table_.size() != atoms) throw Error("kernel: table size does not match the state space");
    for (const Rational& x : table_)
      if (x < 0) throw Error("kernel: negative probability");
    for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
    if (index_.size() != names_.size()) throw Error("kernel: duplicate variable name");
  }

  /// A joint distribution: every variable random.
  static DiscreteKernel joint(std::vector<std::string> names, std::vector<std::size_t> cards,
                              std::vector<Rational> table) {
    std::vector<char> fixed(names.size(), 0);
    return DiscreteKernel(std::move(names), std::move(cards), std::move(fixed), std::move(table));
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t card(std::size_t i) const { return cards_.at(i); }
  const std::vector<std::size_t>& cards() const { return cards_; }
  bool is_fixed(std::size_t i) const { return fixed_.at(i) != 0; }
  std::size_t atoms() const { return table_.size(); }
  const std::vector<Rational>& table() const { return table_; }
  std::size_t stride(std::size_t i) const { return strides_.at(i); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t offset(const std::vector<std::size_t>& x) const {
    if (x.size() != size()) throw Error("kernel: assignment has the wrong length");
    std::size_t off = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (x[i] >= cards_[i]) throw Error("kernel: state out of range for '" + names_[i] + "'");
      off += x[i] * strides_[i];
    }
    return off;
  }
  std::size_t state(std::size_t atom, std::size_t var) const { return atom / strides_[var] % cards_[var]; }
  const Rational& at(const std::vector<std::size_t>& x) const { return table_[offset(x)]; }

  bool strictly_positive() const {
    return std::all_of(table_.begin(), table_.end(), [](const Rational& x) { return x > 0; });
  }

  /// Sum over the random states for every fixed context.
  std::vector<Rational> context_sums() const {
    std::vector<Rational> sums(contexts());
    for (std::size_t a = 0; a < atoms(); ++a) sums[context_of(a)] += table_[a];
    return sums;
  }
  bool normalized() const {
    for (const Rational& s : context_sums())
      if (s != 1) return false;
    return true;
  }

  std::size_t contexts() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < size(); ++i)
      if (fixed_[i]) n *= cards_[i];
    return n;
  }
  std::size_t context_of(std::size_t atom) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < size(); ++i)
      if (fixed_[i]) c = c * cards_[i] + state(atom, i);
    return c;
  }

  /// Marginal over the random variables in `keep`; fixed variables stay as context.
  DiscreteKernel marginal(const std::vector<std::string>& keep) const {
    std::vector<char> kept(size(), 0);
    for (const auto& k : keep) {
      auto i = index_of(k);
      if (!i) throw Error("kernel: unknown variable '" + k + "'");
      kept[*i] = 1;
    }
    std::vector<std::string> names;
    std::vector<std::size_t> cards;
    std::vector<char> fixed;
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!kept[i] && !fixed_[i]) continue;
      names.push_back(names_[i]);
      cards.push_back(cards_[i]);
      fixed.push_back(fixed_[i]);
      vars.push_back(i);
    }
    std::size_t atoms = 1;
    for (std::size_t c : cards) atoms *= c;
    std::vector<Rational> table(atoms);
    for (std::size_t a = 0; a < this->atoms(); ++a) {
      if (table_[a] == 0) continue;
      std::size_t off = 0;
      for (std::size_t j = 0; j < vars.size(); ++j) off = off * cards[j] + state(a, vars[j]);
      table[off] += table_[a];
    }
    return DiscreteKernel(std::move(names), std::move(cards), std::move(fixed), std::move(table));
  }

  DiscreteKernel with_fixed(std::size_t var) const {
    DiscreteKernel out = *this;
    out.fixed_.at(var) = 1;
    return out;
  }
  DiscreteKernel with_table(std::vector<Rational> table) const {
    DiscreteKernel out = *this;
    if (table.size() != table_.size()) throw Error("kernel: table size does not match the state space");
    out.table_ = std::move(table);
    return out;
  }

  friend bool operator==(const DiscreteKernel& a, const DiscreteKernel& b) {
    return a.names_ == b.names_ && a.cards_ == b.cards_ && a.fixed_ == b.fixed_ && a.table_ == b.table_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> cards_;
  std::vector<char> fixed_;
  std::vector<Rational> table_;
  std::vector<std::size_t> strides_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

/// Kernel variable index for every graph vertex; the two must describe the same variables.
inline std::vector<std::size_t> align(const DiscreteKernel& q, const Cadmg& g) {
  if (q.size() != g.size()) throw Error("kernel and graph have different numbers of variables");
  std::vector<std::size_t> var(g.size());
  for (Vertex v = 0; v < g.size(); ++v) {
    auto i = q.index_of(g.graph().label(v));
    if (!i) throw Error("kernel has no variable '" + g.graph().label(v) + "'");
    if (q.is_fixed(*i) != g.is_fixed(v))
      throw Error("variable '" + g.graph().label(v) + "' is fixed in only one of kernel and graph");
    var[v] = *i;
  }
  return var;
}

}  // namespace detail

/// Divides q by q(x_r | x_mb(r), x_W). Where that conditional is zero the ratio is 0/0;
/// there the entry takes q(x_{-r}), the value the formula has whenever r is independent
/// of its non-blanket vertices, as it is for every law in the model. For strictly
/// positive q every context row sums to one.
inline DiscreteKernel kernel_fix(const DiscreteKernel& q, const Cadmg& g, Vertex r) {
  const auto var = detail::align(q, g);
  if (!is_fixable(g, r)) throw Error("'" + g.graph().label(r) + "' is not fixable");

  // Condition on r with its random blanket plus every fixed variable.
  std::vector<std::size_t> cond;
  cond.push_back(var[r]);
  for (Vertex m : markov_blanket(g, r))
    if (g.is_random(m)) cond.push_back(var[m]);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q.is_fixed(i)) cond.push_back(i);

  std::size_t space = 1;
  for (std::size_t i : cond) space *= q.card(i);
  const std::size_t r_stride = space / q.card(var[r]);
  auto key = [&](std::size_t atom) {
    std::size_t k = 0;
    for (std::size_t i : cond) k = k * q.card(i) + q.state(atom, i);
    return k;
  };
  std::vector<Rational> with_r(space);
  std::vector<std::size_t> keys(q.atoms());
  for (std::size_t a = 0; a < q.atoms(); ++a) {
    keys[a] = key(a);
    with_r[keys[a]] += q.table()[a];
  }
  std::vector<Rational> without_r(r_stride);
  for (std::size_t k = 0; k < space; ++k) without_r[k % r_stride] += with_r[k];

  // q(x_{-r}): the entry with r's state cleared indexes the sum over r.
  const std::size_t stride = q.stride(var[r]);
  std::vector<Rational> sum_r(q.atoms());
  for (std::size_t a = 0; a < q.atoms(); ++a) sum_r[a - q.state(a, var[r]) * stride] += q.table()[a];

  std::vector<Rational> table(q.atoms());
  for (std::size_t a = 0; a < q.atoms(); ++a) {
    const Rational& num = q.table()[a];
    if (with_r[keys[a]] == 0) {
      table[a] = sum_r[a - q.state(a, var[r]) * stride];
      continue;
    }
    if (num == 0) continue;
    // q(x_r | rest) = with_r / without_r, so num / that = num * without_r / with_r.
    table[a] = num * without_r[keys[a] % r_stride] / with_r[keys[a]];
  }
  DiscreteKernel out = q.with_fixed(var[r]).with_table(std::move(table));
  if (q.strictly_positive() && !out.normalized())
    throw std::logic_error("kernel_fix: result is not normalized");
  return out;
}

/// Fixes along an explicit sequence, updating the graph alongside.
inline std::pair<Cadmg, DiscreteKernel> kernel_fix(const DiscreteKernel& q, const Cadmg& g,
                                                   const std::vector<Vertex>& sequence) {
  Cadmg cg = g;
  DiscreteKernel k = q;
  for (Vertex r : sequence) {
    k = kernel_fix(k, cg, r);
    cg = fix_vertex(cg, r);
  }
  return {cg, k};
}

struct NestedViolation {
  VertexSet reachable;
  std::vector<VertexSet> districts;
  Rational deviation;
};

struct NestedReport {
  std::size_t reachable_sets_checked = 0;
  std::vector<NestedViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// For every reachable set S compares phi_{V\S}(p) with the product of phi_{V\D}(p) over
/// the districts D of phi_{V\S}(G), on assignments with p(x) > 0. When S is a single
/// district its kernel must also ignore fixed vertices other than its parents. Without a
/// tolerance the comparison is exact.
inline NestedReport check_nested_markov(const DiscreteKernel& p, const Admg& graph,
                                        std::optional<Rational> tolerance = std::nullopt) {
  const Cadmg base(graph);
  detail::guard_size(base);
  detail::align(p, base);
  if (!p.normalized()) throw Error("distribution does not sum to one");

  const auto sets = reachable_sets(base);
  std::set<detail::Bits> reachable;
  for (const auto& s : sets) reachable.insert(detail::to_bits(s));

  std::map<detail::Bits, std::pair<Cadmg, DiscreteKernel>> memo;
  const detail::Bits all = detail::to_bits(graph.all());
  memo.emplace(all, std::pair{base, p});
  std::function<const std::pair<Cadmg, DiscreteKernel>&(detail::Bits)> fixed_at =
      [&](detail::Bits s) -> const std::pair<Cadmg, DiscreteKernel>& {
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    for (detail::Bits rest = all & ~s; rest; rest &= rest - 1) {
      Vertex r = static_cast<Vertex>(__builtin_ctzll(rest));
      detail::Bits parent = s | detail::bit(r);
      if (!reachable.count(parent) || !detail::fixable_in(graph, parent, r)) continue;
      const auto& [pg, pk] = fixed_at(parent);
      DiscreteKernel k = kernel_fix(pk, pg, r);
      Cadmg cg = fix_vertex(pg, r);
      return memo.emplace(s, std::pair{std::move(cg), std::move(k)}).first->second;
    }
    throw std::logic_error("check_nested_markov: set is not reachable");
  };

  NestedReport report;
  for (const VertexSet& s : sets) {
    const detail::Bits bits = detail::to_bits(s);
    const auto& [g, lhs] = fixed_at(bits);
    ++report.reachable_sets_checked;
    std::vector<VertexSet> ds = districts(g);
    std::vector<const DiscreteKernel*> factors;
    for (const VertexSet& d : ds) factors.push_back(&fixed_at(detail::to_bits(d)).second);

    Rational worst = 0;
    for (std::size_t a = 0; a < p.atoms(); ++a) {
      if (p.table()[a] == 0) continue;
      Rational rhs = 1;
      for (const DiscreteKernel* f : factors) rhs *= f->table()[a];
      Rational dev = abs(lhs.table()[a] - rhs);
      if (dev > worst) worst = dev;
    }
    // A district kernel may depend only on its own variables and the fixed vertices with
    // an edge into it. Contexts of zero mass are skipped.
    if (ds.size() == 1) {
      const auto var = detail::align(lhs, g);
      std::vector<std::size_t> keep;
      for (Vertex x : s) keep.push_back(var[x]);
      for (Vertex x : parents(g.graph(), s))
        if (g.is_fixed(x)) keep.push_back(var[x]);
      const auto sums = lhs.context_sums();
      std::map<std::vector<std::size_t>, std::pair<Rational, Rational>> range;
      for (std::size_t a = 0; a < lhs.atoms(); ++a) {
        if (sums[lhs.context_of(a)] == 0) continue;
        std::vector<std::size_t> key;
        for (std::size_t i : keep) key.push_back(lhs.state(a, i));
        const Rational& x = lhs.table()[a];
        auto [it, fresh] = range.try_emplace(std::move(key), x, x);
        if (!fresh) {
          if (x < it->second.first) it->second.first = x;
          if (x > it->second.second) it->second.second = x;
        }
      }
      for (const auto& [key, lo_hi] : range) {
        Rational dev = lo_hi.second - lo_hi.first;
        if (dev > worst) worst = dev;
      }
    }
    const bool bad = tolerance ? worst > *tolerance : worst != 0;
    if (bad) report.violations.push_back({s, ds, worst});
  }
  return report;
}

/// Reads `x1,...,xn,p` rows; p is `num/den` or a decimal. Columns are matched to graph
/// labels by name. State counts are one more than the largest state seen. Omitted rows
/// have probability zero; the listed probabilities must sum to exactly one.
inline Rational parse_probability(std::string_view text) {
  auto digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!digits(num) || !digits(den)) throw Error("malformed probability '" + std::string(text) + "'");
    Integer d{std::string(den)};
    if (d == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    return Rational(Integer(std::string(num)), d);
  }
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty()) whole = "0";
  if (!digits(whole) || (dot != std::string_view::npos && !digits(frac)))
    throw Error("malformed probability '" + std::string(text) + "'");
  Integer scale = pow(Integer(10), static_cast<unsigned>(frac.size()));
  Integer num = Integer(std::string(whole)) * scale + (frac.empty() ? Integer(0) : Integer(std::string(frac)));
  return Rational(num, scale);
}

inline DiscreteKernel read_distribution(std::istream& in, const Admg& g) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      auto b = cell.find_first_not_of(" \t\r");
      auto e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw Error("distribution: empty file");
  const auto header = split(line);
  if (header.size() < 2 || header.back() != "p") throw Error("distribution: last column must be 'p'");
  const std::size_t n = header.size() - 1;
  if (n != g.size()) throw Error("distribution: expected one column per graph vertex");
  std::vector<Vertex> column_vertex(n);
  std::vector<char> seen(g.size(), 0);
  for (std::size_t c = 0; c < n; ++c) {
    auto v = g.find(header[c]);
    if (!v) throw Error("distribution: column '" + header[c] + "' is not a graph vertex");
    if (seen[*v]++) throw Error("distribution: duplicate column '" + header[c] + "'");
    column_vertex[c] = *v;
  }

  std::vector<std::pair<std::vector<std::size_t>, Rational>> rows;
  std::vector<std::size_t> cards(g.size(), 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw Error("distribution line " + std::to_string(line_no) + ": wrong number of columns");
    std::vector<std::size_t> x(g.size());
    for (std::size_t c = 0; c < n; ++c) {
      const auto& s = cells[c];
      if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
        throw Error("distribution line " + std::to_string(line_no) + ": state '" + s + "' is not a number");
      x[column_vertex[c]] = std::stoul(s);
      cards[column_vertex[c]] = std::max(cards[column_vertex[c]], x[column_vertex[c]] + 1);
    }
    try {
      rows.emplace_back(std::move(x), parse_probability(cells.back()));
    } catch (const Error& e) {
      throw Error("distribution line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::size_t atoms = 1;
  for (std::size_t c : cards) {
    if (atoms > kMaxKernelAtoms / c) throw SizeGuardError("distribution: state space exceeds the size guard");
    atoms *= c;
  }
  std::vector<Rational> table(atoms);
  std::vector<char> filled(atoms, 0);
  DiscreteKernel shape = DiscreteKernel::joint(g.labels(), cards, std::vector<Rational>(atoms));
  Rational total = 0;
  for (const auto& [x, prob] : rows) {
    std::size_t off = shape.offset(x);
    if (filled[off]++) throw Error("distribution: duplicate row");
    table[off] = prob;
    total += prob;
  }
  if (total != 1) throw Error("distribution: probabilities sum to " + total.str() + ", not 1");
  return DiscreteKernel::joint(g.labels(), std::move(cards), std::move(table));
}

inline void write_distribution(std::ostream& out, const DiscreteKernel& p) {
  for (std::size_t i = 0; i < p.size(); ++i) out << p.name(i) << ',';
  out << "p\n";
  for (std::size_t a = 0; a < p.atoms(); ++a) {
    if (p.table()[a] == 0) continue;
    for (std::size_t i = 0; i < p.size(); ++i) out << p.state(a, i) << ',';
    out << p.table()[a].str() << '\n';
  }
}

}  // namespace admg
