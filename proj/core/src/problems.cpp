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

#include "decadam/problems.hpp"

#include <algorithm>
#include <cmath>

#include "decadam/errors.hpp"

namespace decadam {

namespace {

constexpr double kRidge = 1e-3;      // regularizer for generated suites
constexpr int kLogisticSamples = 40; // per-worker sample count

double largest_eigenvalue(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  return solver.eigenvalues().maxCoeff();
}

/// Numerically stable log(1 + exp(z)).
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Squash phi(z) = z^2 / (1 + z^2): smooth, bounded, nonconvex beyond
/// |z| = 1/sqrt(3); |phi'| <= 9/(8 sqrt(3)), |phi''| <= 2.
double squash(double z) { return z * z / (1.0 + z * z); }

double squash_d1(double z) {
  const double w = 1.0 + z * z;
  return 2.0 * z / (w * w);
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::logistic: return "logistic";
    case ProblemKind::nonconvex_toy: return "nonconvex_toy";
  }
  return "?";
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::gaussian ? "gaussian" : "student_t";
}

ProblemKind problem_kind_from_string(const std::string& s) {
  if (s == "quadratic") return ProblemKind::quadratic;
  if (s == "logistic") return ProblemKind::logistic;
  if (s == "nonconvex_toy") return ProblemKind::nonconvex_toy;
  throw ValidationError("unknown problem kind: " + s);
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "student_t") return NoiseKind::student_t;
  throw ValidationError("unknown noise kind: " + s);
}

void Problem::finalize_quadratic() {
  const auto& q = std::get<QuadraticData>(data_);
  double l = 0.0;
  for (const auto& a : q.a)
    l = std::max(l, largest_eigenvalue(a.transpose() * a));
  smoothness_ = l + 2.0 * q.mu;

  // Closed-form optimum of the averaged objective.
  Mat h = Mat::Zero(dim_, dim_);
  Vec c = Vec::Zero(dim_);
  for (int k = 0; k < num_workers_; ++k) {
    h += q.a[k].transpose() * q.a[k];
    c += q.a[k].transpose() * q.b[k];
  }
  h /= static_cast<double>(num_workers_);
  c /= static_cast<double>(num_workers_);
  h += 2.0 * q.mu * Mat::Identity(dim_, dim_);
  const Vec x_star = h.ldlt().solve(c);
  minimizer_ = x_star;
  f_star_ = global_objective(x_star);
}

Problem Problem::from_quadratics(std::vector<Mat> a, std::vector<Vec> b,
                                 double mu, OracleOptions opts) {
  if (a.empty() || a.size() != b.size())
    throw ValidationError("quadratic suite needs matching A/b per worker");
  Problem p;
  p.kind_ = ProblemKind::quadratic;
  p.num_workers_ = static_cast<int>(a.size());
  p.dim_ = static_cast<int>(a[0].cols());
  p.opts_ = std::move(opts);
  if (p.opts_.sigma.size() == 0) p.opts_.sigma = Vec::Zero(p.dim_);
  if (p.opts_.sigma.size() != p.dim_)
    throw ValidationError("sigma must have one entry per coordinate");
  p.data_ = QuadraticData{std::move(a), std::move(b), mu};
  p.finalize_quadratic();
  return p;
}

Problem Problem::make_heterogeneous(ProblemKind kind, int num_workers, int dim,
                                    double heterogeneity, std::uint64_t seed,
                                    OracleOptions opts) {
  if (num_workers < 1 || dim < 1)
    throw ValidationError("num_workers and dim must be >= 1");
  if (heterogeneity < 0.0 || heterogeneity > 1.0)
    throw ValidationError("heterogeneity must be in [0,1]");
  if (opts.batch < 1) throw ValidationError("batch must be >= 1");
  if (opts.sigma.size() == 0) opts.sigma = Vec::Zero(dim);
  if (opts.sigma.size() != dim)
    throw ValidationError("sigma must have one entry per coordinate");

  CounterRng shared(seed, StreamPurpose::problem_gen, 0);
  auto worker_rng = [seed](int k) {
    return CounterRng(seed, StreamPurpose::problem_gen,
                      static_cast<std::uint64_t>(k) + 1);
  };
  const double h = heterogeneity;

  switch (kind) {
    case ProblemKind::quadratic: {
      const double scale = 0.5 / std::sqrt(static_cast<double>(dim));
      Mat a_base = Mat::Identity(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a_base(i, j) += scale * shared.normal();
      const Vec b_base = shared.normal_vec(dim);

      std::vector<Mat> a(num_workers);
      std::vector<Vec> b(num_workers);
      for (int k = 0; k < num_workers; ++k) {
        auto rng = worker_rng(k);
        a[k] = a_base;
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j)
            a[k](i, j) += h * scale * rng.normal();
        b[k] = b_base + h * rng.normal_vec(dim);
      }
      return from_quadratics(std::move(a), std::move(b), kRidge,
                             std::move(opts));
    }
    case ProblemKind::logistic: {
      // Two Gaussian label clusters along a shared direction; heterogeneity
      // trades shared samples for worker-preferred-label samples, reaching
      // fully label-disjoint local sets at h = 1.
      Vec direction = shared.normal_vec(dim);
      direction /= std::max(direction.norm(), 1e-12);
      const int n = kLogisticSamples;
      const int n_skew = static_cast<int>(std::lround(h * n));
      const int n_common = n - n_skew;

      Mat common_x(n_common, dim);
      Vec common_y(n_common);
      for (int i = 0; i < n_common; ++i) {
        const double label = (i % 2 == 0) ? 1.0 : -1.0;
        common_y[i] = label;
        for (int j = 0; j < dim; ++j)
          common_x(i, j) = 1.2 * label * direction[j] + 0.6 * shared.normal();
      }

      Problem p;
      p.kind_ = ProblemKind::logistic;
      p.num_workers_ = num_workers;
      p.dim_ = dim;
      p.opts_ = std::move(opts);
      LogisticData data;
      data.mu = kRidge;
      data.features.resize(num_workers);
      data.labels.resize(num_workers);
      double l = 0.0;
      for (int k = 0; k < num_workers; ++k) {
        auto rng = worker_rng(k);
        Mat x(n, dim);
        Vec y(n);
        x.topRows(n_common) = common_x;
        y.head(n_common) = common_y;
        const double preferred = (k % 2 == 0) ? 1.0 : -1.0;
        for (int i = n_common; i < n; ++i) {
          y[i] = preferred;
          for (int j = 0; j < dim; ++j)
            x(i, j) = 1.2 * preferred * direction[j] + 0.6 * rng.normal();
        }
        l = std::max(l, largest_eigenvalue(x.transpose() * x) / (4.0 * n));
        data.features[k] = std::move(x);
        data.labels[k] = std::move(y);
      }
      p.smoothness_ = l + data.mu;
      p.data_ = std::move(data);
      return p;
    }
    case ProblemKind::nonconvex_toy: {
      Problem p;
      p.kind_ = ProblemKind::nonconvex_toy;
      p.num_workers_ = num_workers;
      p.dim_ = dim;
      p.opts_ = std::move(opts);
      ToyData data;
      data.scales = Vec(dim);
      for (int j = 0; j < dim; ++j)
        data.scales[j] = 0.5 + shared.uniform01();
      const Vec center_base = 0.5 * shared.normal_vec(dim);
      data.centers.resize(num_workers);
      for (int k = 0; k < num_workers; ++k) {
        auto rng = worker_rng(k);
        data.centers[k] = center_base + h * rng.normal_vec(dim);
      }
      p.smoothness_ = 2.0 * data.scales.maxCoeff();  // sup |phi''| = 2
      p.data_ = std::move(data);
      return p;
    }
  }
  throw ValidationError("unknown problem kind");
}

double Problem::objective(int worker, const Vec& x) const {
  if (worker < 0 || worker >= num_workers_)
    throw ValidationError("worker index out of range");
  if (std::holds_alternative<QuadraticData>(data_)) {
    const auto& q = std::get<QuadraticData>(data_);
    return 0.5 * (q.a[worker] * x - q.b[worker]).squaredNorm() +
           q.mu * x.squaredNorm();
  }
  if (std::holds_alternative<LogisticData>(data_)) {
    const auto& lg = std::get<LogisticData>(data_);
    const Vec z = lg.features[worker] * x;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      sum += softplus(-lg.labels[worker][i] * z[i]);
    return sum / static_cast<double>(z.size()) +
           0.5 * lg.mu * x.squaredNorm();
  }
  const auto& toy = std::get<ToyData>(data_);
  double sum = 0.0;
  for (int j = 0; j < dim_; ++j)
    sum += toy.scales[j] * squash(x[j] - toy.centers[worker][j]);
  return sum;
}

Vec Problem::full_gradient(int worker, const Vec& x) const {
  if (worker < 0 || worker >= num_workers_)
    throw ValidationError("worker index out of range");
  if (std::holds_alternative<QuadraticData>(data_)) {
    const auto& q = std::get<QuadraticData>(data_);
    return q.a[worker].transpose() * (q.a[worker] * x - q.b[worker]) +
           2.0 * q.mu * x;
  }
  if (std::holds_alternative<LogisticData>(data_)) {
    const auto& lg = std::get<LogisticData>(data_);
    const Mat& feats = lg.features[worker];
    const Vec z = feats * x;
    Vec coeff(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double y = lg.labels[worker][i];
      coeff[i] = -y * sigmoid(-y * z[i]);
    }
    return feats.transpose() * coeff / static_cast<double>(z.size()) +
           lg.mu * x;
  }
  const auto& toy = std::get<ToyData>(data_);
  Vec g(dim_);
  for (int j = 0; j < dim_; ++j)
    g[j] = toy.scales[j] * squash_d1(x[j] - toy.centers[worker][j]);
  return g;
}

Vec Problem::stochastic_gradient(int worker, const Vec& x,
                                 CounterRng& rng) const {
  Vec g = full_gradient(worker, x);
  const double batch_scale = 1.0 / std::sqrt(static_cast<double>(opts_.batch));
  for (int j = 0; j < dim_; ++j) {
    if (opts_.sigma[j] != 0.0) {
      const double z = opts_.noise == NoiseKind::gaussian
                           ? rng.normal()
                           : rng.student_t3_unit();
      g[j] += opts_.sigma[j] * batch_scale * z;
    }
  }
  if (opts_.clip_G) {
    const double cap = *opts_.clip_G;
    for (int j = 0; j < dim_; ++j) g[j] = std::clamp(g[j], -cap, cap);
  }
  return g;
}

double Problem::global_objective(const Vec& x) const {
  double sum = 0.0;
  for (int k = 0; k < num_workers_; ++k) sum += objective(k, x);
  return sum / static_cast<double>(num_workers_);
}

Vec Problem::global_gradient(const Vec& x) const {
  Vec g = Vec::Zero(dim_);
  for (int k = 0; k < num_workers_; ++k) g += full_gradient(k, x);
  return g / static_cast<double>(num_workers_);
}

}  // namespace decadam
