// Copyright 2026 The decadam authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "decadam/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "decadam/errors.hpp"

namespace decadam {

namespace {

constexpr double kDisconnectedTol = 1e-12;

std::vector<std::vector<int>> neighbors_from_edges(
    int num_workers, const std::set<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> lists(num_workers);
  for (const auto& [i, j] : edges) {
    lists[i].push_back(j);
    lists[j].push_back(i);
  }
  for (auto& l : lists) std::sort(l.begin(), l.end());
  return lists;
}

/// Undirected edge set (i < j) for each graph family.
std::set<std::pair<int, int>> build_edges(TopologyKind kind, int k) {
  std::set<std::pair<int, int>> edges;
  auto add = [&edges](int a, int b) {
    if (a == b) return;
    edges.insert({std::min(a, b), std::max(a, b)});
  };
  switch (kind) {
    case TopologyKind::ring:
      for (int i = 0; i < k; ++i) {
        add(i, (i + 1) % k);
        add(i, (i + k - 1) % k);
      }
      break;
    case TopologyKind::complete:
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) add(i, j);
      break;
    case TopologyKind::grid2d: {
      // Most-square torus factorization k = a x b with a <= b.
      int a = 1;
      for (int f = 1; f * f <= k; ++f)
        if (k % f == 0) a = f;
      const int b = k / a;
      auto id = [b](int r, int c) { return r * b + c; };
      for (int r = 0; r < a; ++r) {
        for (int c = 0; c < b; ++c) {
          add(id(r, c), id(r, (c + 1) % b));
          add(id(r, c), id((r + 1) % a, c));
        }
      }
      break;
    }
    case TopologyKind::star_regularized:
      for (int j = 1; j < k; ++j) add(0, j);
      break;
  }
  return edges;
}

Mat weights_from_neighbors(const std::vector<std::vector<int>>& lists,
                           WeightRule rule) {
  const int k = static_cast<int>(lists.size());
  Mat w = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    if (rule == WeightRule::uniform_neighbor) {
      // 1/(deg+1) on the diagonal as well (valid on degree-regular graphs):
      // every row then holds one repeated value, so gossip maps identical
      // worker states to identical results bit for bit.
      const double v = 1.0 / (static_cast<double>(lists[i].size()) + 1.0);
      for (int j : lists[i]) w(i, j) = v;
      w(i, i) = v;
    } else {
      for (int j : lists[i]) {
        const auto deg_max = std::max(lists[i].size(), lists[j].size());
        w(i, j) = 1.0 / (1.0 + static_cast<double>(deg_max));
      }
      w(i, i) = 1.0 - w.row(i).sum();
    }
  }
  return w;
}

}  // namespace

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::ring: return "ring";
    case TopologyKind::complete: return "complete";
    case TopologyKind::grid2d: return "grid2d";
    case TopologyKind::star_regularized: return "star_regularized";
  }
  return "?";
}

std::string to_string(WeightRule rule) {
  return rule == WeightRule::uniform_neighbor ? "uniform_neighbor"
                                              : "metropolis";
}

TopologyKind topology_kind_from_string(const std::string& s) {
  if (s == "ring") return TopologyKind::ring;
  if (s == "complete") return TopologyKind::complete;
  if (s == "grid2d") return TopologyKind::grid2d;
  if (s == "star_regularized") return TopologyKind::star_regularized;
  throw ValidationError("unknown topology kind: " + s);
}

WeightRule weight_rule_from_string(const std::string& s) {
  if (s == "uniform_neighbor") return WeightRule::uniform_neighbor;
  if (s == "metropolis") return WeightRule::metropolis;
  throw ValidationError("unknown weight rule: " + s);
}

void validate_mixing_matrix(const Mat& w, double tol) {
  if (w.rows() != w.cols() || w.rows() < 1)
    throw ValidationError("mixing matrix must be square and nonempty");
  const int k = static_cast<int>(w.rows());
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (std::abs(w(i, j) - w(j, i)) > tol) {
        throw ValidationError("mixing matrix asymmetric at (" +
                              std::to_string(i) + "," + std::to_string(j) +
                              ")");
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    if (std::abs(w.row(i).sum() - 1.0) > tol)
      throw ValidationError("row " + std::to_string(i) +
                            " does not sum to 1");
    if (std::abs(w.col(i).sum() - 1.0) > tol)
      throw ValidationError("column " + std::to_string(i) +
                            " does not sum to 1");
  }
}

std::vector<double> mixing_eigenvalues(const Mat& w) {
  validate_mixing_matrix(w);
  Eigen::SelfAdjointEigenSolver<Mat> solver(w);
  if (solver.info() != Eigen::Success)
    throw ValidationError("eigendecomposition failed");
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + w.rows());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

SpectralInfo spectral_gap(const Mat& w) {
  const auto eigs = mixing_eigenvalues(w);  // descending
  const int k = static_cast<int>(eigs.size());
  double second = 0.0;
  if (k >= 2) {
    // Largest eigenvalue is 1 (doubly stochastic); the one instance is
    // dropped and the remaining maximum modulus kept.
    second = std::max(std::abs(eigs[1]), std::abs(eigs[k - 1]));
  }
  return SpectralInfo{second, 1.0 - second};
}

double mixing_beta(const Mat& w) {
  const auto eigs = mixing_eigenvalues(w);
  double beta = 0.0;
  for (double lam : eigs) beta = std::max(beta, 1.0 - lam);
  return beta;
}

bool check_spectral_deflation(const Mat& w) {
  validate_mixing_matrix(w);
  const int k = static_cast<int>(w.rows());
  const Mat deflated = w - Mat::Constant(k, k, 1.0 / k);
  Eigen::SelfAdjointEigenSolver<Mat> solver(deflated);
  if (solver.info() != Eigen::Success)
    throw ValidationError("eigendecomposition failed");
  const double norm2 = std::max(std::abs(solver.eigenvalues()(0)),
                                std::abs(solver.eigenvalues()(k - 1)));
  const double rho = spectral_gap(w).spectral_gap;
  return norm2 <= (1.0 - rho) + 1e-10;
}

Topology build_topology(TopologyKind kind, int num_workers, WeightRule rule) {
  if (num_workers < 1)
    throw ValidationError("num_workers must be >= 1");
  const auto edges = build_edges(kind, num_workers);
  auto lists = neighbors_from_edges(num_workers, edges);
  // Uniform weights require a degree-regular graph; the star is the one
  // irregular family here and always takes metropolis weights.
  const WeightRule effective_rule =
      kind == TopologyKind::star_regularized ? WeightRule::metropolis : rule;
  Mat w = weights_from_neighbors(lists, effective_rule);
  validate_mixing_matrix(w, 1e-12);

  Topology topo;
  topo.num_workers = num_workers;
  topo.weights = std::move(w);
  topo.neighbor_lists = std::move(lists);
  const auto spec = spectral_gap(topo.weights);
  topo.second_eig_mod = spec.second_eig_mod;
  topo.spectral_gap = spec.spectral_gap;
  if (topo.spectral_gap < kDisconnectedTol)
    throw ValidationError("zero spectral gap: topology is disconnected");
  return topo;
}

Topology topology_from_matrix(const Mat& w) {
  validate_mixing_matrix(w);
  const int k = static_cast<int>(w.rows());
  Topology topo;
  topo.num_workers = k;
  topo.weights = w;
  topo.neighbor_lists.resize(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && w(i, j) != 0.0) topo.neighbor_lists[i].push_back(j);
  const auto spec = spectral_gap(w);
  topo.second_eig_mod = spec.second_eig_mod;
  topo.spectral_gap = spec.spectral_gap;
  if (topo.spectral_gap < kDisconnectedTol)
    throw ValidationError("zero spectral gap: topology is disconnected");
  return topo;
}

}  // namespace decadam
