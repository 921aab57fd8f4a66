#pragma once

// Command-line front end. `run` is separate from main so tests can drive it with
// in-memory streams. Exit codes: 0 success, 1 property fails or refusal, 2 usage.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "admg/admg.hpp"

namespace admg::cli {

inline constexpr int kOk = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

/// Thrown for bad invocations that CLI11 cannot catch itself.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline ParsedGraph load(const std::string& path, std::istream& in) {
  if (path == "-") return parse_graph(in);
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open '" + path + "'");
  return parse_graph(file);
}

/// The observed ADMG: latent vertices projected out, no fixed vertices allowed.
inline Admg observed(const ParsedGraph& pg) {
  if (!pg.graph.fixed().empty()) throw Error("this command expects a graph without fixed vertices");
  if (pg.latent.empty()) return pg.graph.graph();
  return latent_project(pg.graph.graph(), pg.latent);
}

inline VertexSet parse_set(const Admg& g, const std::string& text) {
  std::vector<Vertex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("empty vertex name in '" + text + "'");
    out.push_back(g.at(item));
  }
  if (out.empty()) throw UsageError("--set needs at least one vertex");
  return VertexSet(std::move(out));
}

inline double parse_rho(const std::string& text) {
  const std::string prefix = "rho=";
  if (text.rfind(prefix, 0) != 0) throw UsageError("--continuous expects rho=R");
  std::size_t used = 0;
  double rho = 0;
  try {
    rho = std::stod(text.substr(prefix.size()), &used);
  } catch (const std::exception&) {
    throw UsageError("--continuous expects rho=R with R a number");
  }
  if (used != text.size() - prefix.size()) throw UsageError("--continuous expects rho=R with R a number");
  return rho;
}

inline std::string labels_line(const Admg& g, const VertexSet& s) { return join_labels(g, s); }

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Acyclic directed mixed graphs: projections, fixing, minimal reductions and couplings", "admg"};
  app.require_subcommand(1);

  std::string file, v_name, w_name, set_text, dist_path, out_path, continuous, marginal = "normal", prefer = "directed";
  std::size_t k = 2, n = 1000;
  std::optional<std::uint64_t> seed, set_w;
  std::optional<std::string> tol;
  unsigned bits = 64;
  bool exact = false, json = false;
  std::string family;
  std::size_t gen_k = 0;

  auto add_file = [&](CLI::App* sub) { sub->add_option("file", file, "Graph file, or - for stdin")->required(); };
  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("v", v_name, "First vertex")->required();
    sub->add_option("w", w_name, "Second vertex")->required();
  };
  auto add_prefer = [&](CLI::App* sub) {
    sub->add_option("--prefer", prefer, "Case preference when several apply")
        ->check(CLI::IsMember({"directed", "bidirected"}));
  };

  auto* project = app.add_subcommand("project", "Latent projection removing the latent: vertices");
  add_file(project);
  auto* canonical = app.add_subcommand("canonical", "Canonical DAG with one hidden vertex per bidirected edge");
  add_file(canonical);
  auto* marg = app.add_subcommand("marg", "Maximal arid projection");
  add_file(marg);
  auto* closure_cmd = app.add_subcommand("closure", "Closure of a vertex set");
  add_file(closure_cmd);
  closure_cmd->add_option("--set", set_text, "Comma-separated vertices")->required();
  auto* dense = app.add_subcommand("dense", "Dense connectivity of a pair; exit 0 iff dense");
  add_file(dense);
  add_pair(dense);
  auto* minimal = app.add_subcommand("minimal", "Minimal reduced graph for a pair");
  add_file(minimal);
  add_pair(minimal);
  add_prefer(minimal);
  auto* couple = app.add_subcommand("couple", "Sample the coupling that makes the pair equal");
  add_file(couple);
  add_pair(couple);
  add_prefer(couple);
  couple->add_option("-k", k, "Modulus")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  couple->add_option("--continuous", continuous, "Continuous variant, rho=R");
  couple->add_option("--marginal", marginal, "Continuous marginal")->check(CLI::IsMember({"normal", "uniform"}));
  couple->add_option("--bits", bits, "Continuous word width")->check(CLI::Range(1u, 64u));
  couple->add_option("-n", n, "Number of rows");
  couple->add_option("--seed", seed, "Random seed");
  couple->add_option("--set-w", set_w, "Fix the input value in the directed case");
  couple->add_option("-o", out_path, "Write CSV to this file (requires --seed)");
  auto* verify = app.add_subcommand("verify", "Exact check of the coupling; exit 0 iff every check passes");
  add_file(verify);
  add_pair(verify);
  add_prefer(verify);
  verify->add_option("-k", k, "Modulus")->check(CLI::Range(std::size_t{2}, std::size_t{64}));
  verify->add_flag("--json", json, "Machine-readable report");
  auto* nested = app.add_subcommand("nested-check", "Nested Markov check of a distribution table");
  add_file(nested);
  nested->add_option("--dist", dist_path, "Distribution CSV")->required();
  auto* exact_flag = nested->add_flag("--exact", exact, "Exact rational comparison (default)");
  nested->add_option("--tol", tol, "Tolerance on the absolute deviation")->excludes(exact_flag);
  auto* gen = app.add_subcommand("gen", "Generate benchmark graphs");
  gen->add_option("family", family, "Graph family")->required()->check(CLI::IsMember({"comp-graph"}));
  gen->add_option("k", gen_k, "Size parameter")->required()->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Preference preference = prefer == "bidirected" ? Preference::bidirected_first : Preference::directed_first;
  try {
    if (*gen) {
      out << serialize_graph(comp_graph(gen_k));
      return kOk;
    }
    const ParsedGraph pg = detail::load(file, in);

    if (*project) {
      out << serialize_graph(latent_project(pg.graph, pg.latent));
      return kOk;
    }
    if (*canonical) {
      const CanonicalDag cd = canonical_dag(pg.graph.graph());
      VertexSet fixed, latent = pg.latent | cd.hidden;
      for (Vertex f : pg.graph.fixed()) fixed.insert(f);
      out << serialize_graph(Cadmg(cd.dag, fixed), latent);
      return kOk;
    }

    const Admg g = detail::observed(pg);
    if (*marg) {
      out << serialize_graph(marg_project(g));
      return kOk;
    }
    if (*closure_cmd) {
      const ClosureResult r = closure(g, detail::parse_set(g, set_text));
      out << "closure: " << detail::labels_line(g, r.closure) << '\n';
      out << "intrinsic: " << (r.intrinsic ? "true" : "false") << '\n';
      return kOk;
    }
    if (*dense) {
      const DenseVerdict d = densely_connected(g, g.at(v_name), g.at(w_name));
      out << "dense: " << (d.dense ? "true" : "false") << '\n';
      out << "case: " << to_string(d.kind) << '\n';
      if (d.dense) {
        out << "cases:";
        for (DenseCase c : d.cases) out << ' ' << to_string(c);
        out << '\n';
        out << "witness: " << detail::labels_line(g, d.witness_closure) << '\n';
      }
      return d.dense ? kOk : kFail;
    }
    if (*minimal) {
      const PairReduction r = reduce_pair(g, g.at(v_name), g.at(w_name), preference);
      const Admg& h = r.minimal.reduced;
      out << serialize_graph(h);
      out << "W: " << v_name << ' ' << w_name;
      for (Vertex x = 0; x < h.size(); ++x)
        if (h.label(x) != v_name && h.label(x) != w_name) out << ' ' << h.label(x);
      out << '\n';
      return kOk;
    }
    if (*couple) {
      if (!out_path.empty() && !seed) throw UsageError("writing a dataset to a file requires --seed");
      std::ofstream file_out;
      if (!out_path.empty()) {
        file_out.open(out_path);
        if (!file_out) throw UsageError("cannot write '" + out_path + "'");
      }
      std::ostream& dest = out_path.empty() ? out : file_out;
      const Vertex v = g.at(v_name), w = g.at(w_name);
      if (!continuous.empty()) {
        if (set_w) throw UsageError("--set-w applies to the discrete coupling only");
        ContinuousOptions opts;
        opts.rho = detail::parse_rho(continuous);
        opts.marginal = marginal == "uniform" ? Marginal::uniform : Marginal::normal;
        opts.bits = bits;
        write_csv(dest, continuous_sample(g, v, w, opts, n, seed.value_or(0), preference));
      } else {
        write_csv(dest, sample(build_coupling(g, v, w, k, preference), n, seed.value_or(0), set_w));
      }
      return kOk;
    }
    if (*verify) {
      const TheoremOutcome t = verify_theorem(g, g.at(v_name), g.at(w_name), k, preference);
      if (json) {
        nlohmann::json j;
        j["pair"] = {v_name, w_name};
        j["modulus"] = k;
        j["refused"] = t.refused;
        j["case"] = to_string(t.kind);
        if (t.refused) {
          j["reason"] = t.reason;
        } else {
          const IndependenceReport& r = *t.report;
          j["p_equal"] = r.p_equal.str();
          j["checks"] = {{"equality", r.equality_holds},
                         {"independence", r.independence_holds},
                         {"uniform", r.uniform_marginals}};
          j["failing_subset"] = r.failing_subset ? nlohmann::json(*r.failing_subset) : nlohmann::json(nullptr);
          j["non_uniform"] = r.non_uniform;
        }
        j["passed"] = t.passed();
        out << j.dump(2) << '\n';
      } else if (t.refused) {
        out << "refused: " << t.reason << '\n';
      } else {
        out << "case: " << to_string(t.kind) << '\n' << render(*t.report, v_name, w_name);
      }
      return t.passed() ? kOk : kFail;
    }
    if (*nested) {
      std::ifstream dist(dist_path);
      if (!dist) throw UsageError("cannot open '" + dist_path + "'");
      const DiscreteKernel p = read_distribution(dist, g);
      std::optional<Rational> tolerance;
      if (tol) tolerance = parse_probability(*tol);
      const NestedReport r = check_nested_markov(p, g, tolerance);
      out << "reachable sets checked: " << r.reachable_sets_checked << '\n';
      out << "violations: " << r.violations.size() << '\n';
      for (const auto& viol : r.violations) {
        out << "violation: {" << join_labels(g, viol.reachable, ", ") << "} districts";
        for (const auto& d : viol.districts) out << " {" << join_labels(g, d, ", ") << '}';
        out << " deviation " << viol.deviation.str() << '\n';
      }
      return r.passed() ? kOk : kFail;
    }
  } catch (const UsageError& e) {
    err << "admg: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "admg: parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "admg: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}

}  // namespace admg::cli
