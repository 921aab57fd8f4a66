#pragma once

// Exact enumeration of coupling laws, equality/independence/uniformity checks,
// and the parity lemma for xor sums over a tree.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "admg/construction.hpp"
#include "admg/kernel.hpp"
#include "admg/projection.hpp"

namespace admg {

/// Enumerations over more assignments than this are refused.
inline constexpr std::uint64_t kMaxOracleAssignments = std::uint64_t{1} << 24;

/// Law of the observed variables with every source (and the input, unless `set_w`)
/// uniform and independent. Counts are integers; probabilities are count / total.
inline DiscreteKernel exact_joint(const CouplingSem& sem, std::optional<std::uint64_t> set_w = std::nullopt) {
  if (set_w && !sem.input_vertex) throw Error("exact_joint: this coupling has no input vertex to set");
  const std::uint64_t k = sem.modulus;
  const std::size_t s = sem.sources.size();
  const bool free_input = sem.input_vertex && !set_w;
  const std::size_t dims = s + (free_input ? 1 : 0);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < dims; ++i) {
    if (total > kMaxOracleAssignments / k)
      throw SizeGuardError("exact_joint: " + std::to_string(k) + "^" + std::to_string(dims) +
                           " assignments exceed the limit of 2^24");
    total *= k;
  }
  const std::size_t n = sem.graph.size();
  std::size_t atoms = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (atoms > kMaxKernelAtoms / k) throw SizeGuardError("exact_joint: observed state space too large");
    atoms *= k;
  }
  std::vector<std::size_t> cards(n, k);
  std::vector<std::uint64_t> counts(atoms, 0);
  std::vector<std::uint64_t> digits(dims, 0);
  std::vector<std::uint64_t> values(s);
  for (std::uint64_t count = 0; count < total; ++count) {
    std::copy(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(s), values.begin());
    std::optional<std::uint64_t> input;
    if (sem.input_vertex) input = set_w ? *set_w : digits[s];
    const auto x = evaluate(sem, values, input);
    std::size_t off = 0;
    for (std::size_t i = 0; i < n; ++i) off = off * k + x[i];
    ++counts[off];
    for (std::size_t d = 0; d < dims && ++digits[d] == k; ++d) digits[d] = 0;
  }
  std::vector<Rational> table(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a)
    if (counts[a]) table[a] = Rational(counts[a], total);
  return DiscreteKernel::joint(sem.graph.labels(), std::move(cards), std::move(table));
}

struct IndependenceReport {
  bool equality_holds = false;
  Rational p_equal;
  bool independence_holds = false;
  bool uniform_marginals = false;
  /// Smallest subset (by size, then variable order) whose joint is not the product of its marginals.
  std::optional<std::vector<std::string>> failing_subset;
  /// Variables whose marginal is not uniform.
  std::vector<std::string> non_uniform;
  DiscreteKernel law;

  bool passed() const { return equality_holds && independence_holds && uniform_marginals; }
};

namespace detail {

inline bool factorizes(const DiscreteKernel& p, const std::vector<std::size_t>& vars) {
  std::vector<std::string> names;
  for (std::size_t i : vars) names.push_back(p.name(i));
  const DiscreteKernel joint = p.marginal(names);
  std::vector<DiscreteKernel> unary;
  for (const auto& nm : names) unary.push_back(p.marginal({nm}));
  for (std::size_t a = 0; a < joint.atoms(); ++a) {
    Rational prod = 1;
    for (std::size_t j = 0; j < unary.size(); ++j) prod *= unary[j].table()[joint.state(a, j)];
    if (prod != joint.table()[a]) return false;
  }
  return true;
}

}  // namespace detail

/// (i) P(X_v = X_w) = 1; (ii) X_v together with every variable other than v and w is
/// mutually independent; (iii) every marginal is uniform. All checks are exact.
inline IndependenceReport verify_pair(const DiscreteKernel& p, const std::string& v, const std::string& w) {
  const auto iv = p.index_of(v), iw = p.index_of(w);
  if (!iv) throw Error("verify_pair: no variable '" + v + "'");
  if (!iw) throw Error("verify_pair: no variable '" + w + "'");
  if (*iv == *iw) throw Error("verify_pair: a variable is paired with itself");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.is_fixed(i)) throw Error("verify_pair: expected a joint distribution");

  IndependenceReport r;
  r.law = p;
  r.p_equal = 0;
  for (std::size_t a = 0; a < p.atoms(); ++a)
    if (p.state(a, *iv) == p.state(a, *iw)) r.p_equal += p.table()[a];
  r.equality_holds = r.p_equal == 1;

  r.uniform_marginals = true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const DiscreteKernel m = p.marginal({p.name(i)});
    const Rational u(1, p.card(i));
    if (!std::all_of(m.table().begin(), m.table().end(), [&](const Rational& x) { return x == u; })) {
      r.uniform_marginals = false;
      r.non_uniform.push_back(p.name(i));
    }
  }

  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (i != *iw) others.push_back(i);
  r.independence_holds = detail::factorizes(p, others);
  if (!r.independence_holds) {
    // Localize: smallest failing subset, subsets of equal size in lexicographic order.
    const std::size_t m = others.size();
    for (std::size_t size = 2; size <= m && !r.failing_subset; ++size) {
      std::vector<std::size_t> pick(size);
      for (std::size_t i = 0; i < size; ++i) pick[i] = i;
      while (true) {
        std::vector<std::size_t> vars;
        for (std::size_t i : pick) vars.push_back(others[i]);
        if (!detail::factorizes(p, vars)) {
          std::vector<std::string> names;
          for (std::size_t i : vars) names.push_back(p.name(i));
          r.failing_subset = names;
          break;
        }
        std::size_t i = size;
        while (i > 0 && pick[i - 1] == m - size + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
  }
  return r;
}

/// Plain-text report: one line per check, its verdict followed by a short detail.
inline std::string render(const IndependenceReport& r, const std::string& v, const std::string& w) {
  std::ostringstream out;
  out << "equality: " << (r.equality_holds ? "pass" : "fail") << " — P(X_" << v << " = X_" << w
      << ") = " << r.p_equal.str() << '\n';
  out << "independence: " << (r.independence_holds ? "pass" : "fail") << " — ";
  if (r.independence_holds) {
    out << "X_" << v << " and all variables other than " << w << " are mutually independent";
  } else {
    out << "joint of {";
    for (std::size_t i = 0; i < r.failing_subset->size(); ++i) out << (i ? ", " : "") << (*r.failing_subset)[i];
    out << "} is not the product of its marginals";
  }
  out << '\n';
  out << "uniform: " << (r.uniform_marginals ? "pass" : "fail") << " — ";
  if (r.uniform_marginals) {
    out << "every marginal is uniform";
  } else {
    out << "non-uniform marginal for";
    for (const auto& nm : r.non_uniform) out << ' ' << nm;
  }
  out << '\n';
  return out.str();
}

struct TheoremOutcome {
  /// The pair is not densely connected: a nested constraint separates it.
  bool refused = false;
  std::string reason;
  DenseCase kind = DenseCase::none;
  std::optional<IndependenceReport> report;

  bool passed() const { return !refused && report && report->passed(); }
};

inline TheoremOutcome verify_theorem(const Admg& g, Vertex v, Vertex w, std::size_t k,
                                     Preference preference = Preference::directed_first) {
  TheoremOutcome out;
  CouplingSem sem;
  try {
    sem = build_coupling(g, v, w, k, preference);
  } catch (const NestedConstraint& e) {
    out.refused = true;
    out.reason = e.what();
    return out;
  }
  out.kind = sem.kind;
  out.report = verify_pair(exact_joint(sem), g.label(v), g.label(w));
  return out;
}

struct ParityReport {
  /// Every proper subset of X_1..X_k is jointly uniform (hence independent).
  bool subsets_independent = false;
  /// X_1 + ... + X_k = 0 mod 2 on every assignment.
  bool sum_zero = false;
  /// First failing proper subset (1-based node labels), if any.
  std::optional<std::vector<std::size_t>> failing_subset;
  bool passed() const { return subsets_independent && sum_zero; }
};

/// Edges over nodes 1..k. Each node is the xor of the Bernoulli variables on its edges.
inline ParityReport verify_parity_lemma(std::size_t k, const std::vector<std::pair<std::size_t, std::size_t>>& tree) {
  if (k < 2 || k > 20) throw Error("verify_parity_lemma: k must be between 2 and 20");
  if (tree.size() != k - 1) throw Error("verify_parity_lemma: a tree on k nodes has k - 1 edges");
  std::vector<std::size_t> comp(k);
  for (std::size_t i = 0; i < k; ++i) comp[i] = i;
  auto find = [&](std::size_t x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (auto [a, b] : tree) {
    if (a < 1 || a > k || b < 1 || b > k || a == b) throw Error("verify_parity_lemma: invalid edge");
    std::size_t ra = find(a - 1), rb = find(b - 1);
    if (ra == rb) throw Error("verify_parity_lemma: edges contain a cycle");
    comp[ra] = rb;
  }

  // Histogram of the node pattern over all 2^(k-1) edge assignments.
  const std::size_t edges = k - 1;
  std::vector<std::uint32_t> hist(std::size_t{1} << k, 0);
  ParityReport r;
  r.sum_zero = true;
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << edges); ++z) {
    std::uint32_t x = 0;
    for (std::size_t e = 0; e < edges; ++e)
      if (z >> e & 1) x ^= (1u << (tree[e].first - 1)) | (1u << (tree[e].second - 1));
    if (__builtin_popcount(x) % 2) r.sum_zero = false;
    ++hist[x];
  }
  r.subsets_independent = true;
  const std::uint32_t full = (1u << k) - 1;
  std::vector<std::uint32_t> marg(std::size_t{1} << k);
  for (std::uint32_t s = 1; s < full && r.subsets_independent; ++s) {
    std::fill(marg.begin(), marg.end(), 0);
    for (std::uint32_t x = 0; x <= full; ++x) marg[x & s] += hist[x];
    const std::uint64_t expect = (std::uint64_t{1} << edges) >> __builtin_popcount(s);
    for (std::uint32_t y = s;; y = (y - 1) & s) {
      if (marg[y] != expect) {
        r.subsets_independent = false;
        std::vector<std::size_t> nodes;
        for (std::size_t i = 0; i < k; ++i)
          if (s >> i & 1) nodes.push_back(i + 1);
        r.failing_subset = nodes;
        break;
      }
      if (y == 0) break;
    }
  }
  return r;
}

/// Tree on nodes 1..k from a Prüfer sequence of length k - 2.
inline std::vector<std::pair<std::size_t, std::size_t>> prufer_decode(std::size_t k, const std::vector<std::size_t>& seq) {
  if (k < 2 || seq.size() != k - 2) throw Error("prufer_decode: sequence must have length k - 2");
  std::vector<std::size_t> degree(k + 1, 1);
  for (std::size_t x : seq) {
    if (x < 1 || x > k) throw Error("prufer_decode: label out of range");
    ++degree[x];
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t x : seq) {
    std::size_t leaf = 1;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(leaf, x);
    --degree[leaf];
    --degree[x];
  }
  std::size_t a = 0, b = 0;
  for (std::size_t i = 1; i <= k; ++i)
    if (degree[i] == 1) (a ? b : a) = i;
  edges.emplace_back(a, b);
  return edges;
}

}  // namespace admg
