#pragma once

// Benchmark graph families.

#include <string>
#include <vector>

#include "admg/graph.hpp"

namespace admg {

/// y_i -> z_i -> v, w -> v, bidirected chains y_1..y_k and z_1..z_k joined by
/// y_k <-> z_k, plus y_1 <-> v. Vertices are declared y1..yk, z1..zk, v, w.
inline Admg comp_graph(std::size_t k) {
  if (k < 1) throw Error("comp_graph: k must be at least 1");
  std::vector<std::string> labels;
  labels.reserve(2 * k + 2);
  for (std::size_t i = 1; i <= k; ++i) labels.push_back("y" + std::to_string(i));
  for (std::size_t i = 1; i <= k; ++i) labels.push_back("z" + std::to_string(i));
  labels.push_back("v");
  labels.push_back("w");
  const Vertex v = 2 * k, w = 2 * k + 1;
  auto y = [](std::size_t i) { return i - 1; };
  auto z = [k](std::size_t i) { return k + i - 1; };
  std::vector<Edge> directed, bidirected;
  for (std::size_t i = 1; i <= k; ++i) {
    directed.push_back({y(i), z(i)});
    directed.push_back({z(i), v});
  }
  directed.push_back({w, v});
  for (std::size_t i = 1; i < k; ++i) {
    bidirected.push_back({y(i), y(i + 1)});
    bidirected.push_back({z(i), z(i + 1)});
  }
  bidirected.push_back({y(k), z(k)});
  bidirected.push_back({y(1), v});
  return Admg(std::move(labels), std::move(directed), std::move(bidirected));
}

}  // namespace admg
