#include "fbem/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "fbem/errors.hpp"

namespace fbem::quad {

namespace {

constexpr double kPi = 3.14159265358979323846;

Rule1D compute_gauss_legendre(int n) {
  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    rule.x[n - 1 - i] = 0.5 * (1.0 + z);
    rule.w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

// Stieltjes procedure on a fine discretization of the weight, then Golub-Welsch.
Rule1D compute_gauss_jacobi_u(int n) {
  const Rule1D& base = gauss_legendre(std::max(64, 4 * n));
  const std::size_t m = base.x.size();
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) weight[i] = base.w[i] * base.x[i];

  std::vector<double> a(n), b(n);
  std::vector<double> p_prev(m, 0.0), p_cur(m, 1.0);
  double norm_prev = 1.0;
  for (int k = 0; k < n; ++k) {
    double norm_cur = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      norm_cur += weight[i] * p_cur[i] * p_cur[i];
      moment += weight[i] * base.x[i] * p_cur[i] * p_cur[i];
    }
    a[k] = moment / norm_cur;
    b[k] = k == 0 ? norm_cur : norm_cur / norm_prev;
    std::vector<double> p_next(m);
    for (std::size_t i = 0; i < m; ++i) {
      p_next[i] = (base.x[i] - a[k]) * p_cur[i] - (k == 0 ? 0.0 : b[k] * p_prev[i]);
    }
    p_prev = std::move(p_cur);
    p_cur = std::move(p_next);
    norm_prev = norm_cur;
  }
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    jacobi(k, k) = a[k];
    if (k + 1 < n) jacobi(k, k + 1) = jacobi(k + 1, k) = std::sqrt(b[k + 1]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Rule1D rule;
  for (int k = 0; k < n; ++k) {
    rule.x.push_back(solver.eigenvalues()(k));
    const double v0 = solver.eigenvectors()(0, k);
    rule.w.push_back(b[0] * v0 * v0);
  }
  return rule;
}

TriangleRule compute_triangle_rule(int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  const Rule1D& radial = gauss_jacobi_u(n);
  const Rule1D& angular = gauss_legendre(n);
  TriangleRule rule;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      rule.x1.push_back(radial.x[i]);
      rule.x2.push_back(radial.x[i] * angular.x[j]);
      rule.w.push_back(radial.w[i] * angular.w[j]);
    }
  }
  return rule;
}

template <class Emit>
void for_each_cube_node(int n, Emit&& emit) {
  const Rule1D& g = gauss_legendre(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          emit(g.x[a], g.x[b], g.x[c], g.x[d], g.w[a] * g.w[b] * g.w[c] * g.w[d]);
        }
      }
    }
  }
}

std::vector<PairNode> compute_coincident(int n) {
  std::vector<PairNode> nodes;
  nodes.reserve(6 * n * n * n * n);
  for_each_cube_node(n, [&](double xi, double e1, double e2, double e3, double w) {
    const double weight = w * xi * xi * xi * e1 * e1 * e2;
    const double s = xi * e1 * e2;  // common factor of x - y
    const double x_a1 = xi, x_a2 = xi * (1.0 - e1 + e1 * e2);
    const double y_a1 = xi * (1.0 - e1 * e2 * e3), y_a2 = xi * (1.0 - e1);
    nodes.push_back({x_a1, x_a2, y_a1, y_a2, s * e3, s, weight});
    nodes.push_back({y_a1, y_a2, x_a1, x_a2, -s * e3, -s, weight});

    const double x_b1 = xi, x_b2 = xi * e1 * (1.0 - e2 + e2 * e3);
    const double y_b1 = xi * (1.0 - e1 * e2), y_b2 = xi * e1 * (1.0 - e2);
    nodes.push_back({x_b1, x_b2, y_b1, y_b2, s, s * e3, weight});
    nodes.push_back({y_b1, y_b2, x_b1, x_b2, -s, -s * e3, weight});

    const double x_c1 = xi * (1.0 - e1 * e2 * e3), x_c2 = xi * e1 * (1.0 - e2 * e3);
    const double y_c1 = xi, y_c2 = xi * e1 * (1.0 - e2);
    nodes.push_back({x_c1, x_c2, y_c1, y_c2, -s * e3, s * (1.0 - e3), weight});
    nodes.push_back({y_c1, y_c2, x_c1, x_c2, s * e3, -s * (1.0 - e3), weight});
  });
  return nodes;
}

std::vector<PairNode> compute_common_edge(int n) {
  std::vector<PairNode> nodes;
  nodes.reserve(5 * n * n * n * n);
  for_each_cube_node(n, [&](double xi, double e1, double e2, double e3, double w) {
    const double base = w * xi * xi * xi * e1 * e1;
    nodes.push_back({xi, xi * e1 * e3, xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2), xi * e1 * e2, 0.0, base});
    const double weight = base * e2;
    nodes.push_back({xi, xi * e1, xi * (1.0 - e1 * e2 * e3), xi * e1 * e2 * (1.0 - e3),
                     xi * e1 * e2 * e3, 0.0, weight});
    nodes.push_back({xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2), xi, xi * e1 * e2 * e3,
                     -xi * e1 * e2, 0.0, weight});
    nodes.push_back({xi * (1.0 - e1 * e2 * e3), xi * e1 * e2 * (1.0 - e3), xi, xi * e1,
                     -xi * e1 * e2 * e3, 0.0, weight});
    nodes.push_back({xi * (1.0 - e1 * e2 * e3), xi * e1 * (1.0 - e2 * e3), xi, xi * e1 * e2,
                     -xi * e1 * e2 * e3, 0.0, weight});
  });
  return nodes;
}

std::vector<PairNode> compute_common_vertex(int n) {
  std::vector<PairNode> nodes;
  nodes.reserve(2 * n * n * n * n);
  for_each_cube_node(n, [&](double xi, double e1, double e2, double e3, double w) {
    const double weight = w * xi * xi * xi * e2;
    nodes.push_back({xi, xi * e1, xi * e2, xi * e2 * e3, 0.0, 0.0, weight});
    nodes.push_back({xi * e2, xi * e2 * e1, xi, xi * e3, 0.0, 0.0, weight});
  });
  return nodes;
}

// Thread-safe memoization; references stay valid because map nodes are stable.
template <class Value, class Make>
const Value& memoize(std::map<int, std::unique_ptr<Value>>& cache, std::mutex& mutex, int key,
                     Make&& make) {
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<Value>(make(key))).first;
  }
  return *it->second;
}

void check_count(int n, const char* what) {
  if (n < 1 || n > 64) throw DomainError(std::string("invalid point count for ") + what);
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  check_count(n, "Gauss-Legendre") ;
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  static std::mutex mutex;
  return memoize(cache, mutex, n, compute_gauss_legendre);
}

const Rule1D& gauss_jacobi_u(int n) {
  check_count(n, "Gauss-Jacobi");
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  static std::mutex mutex;
  return memoize(cache, mutex, n, compute_gauss_jacobi_u);
}

const TriangleRule& triangle_rule(int degree) {
  if (degree < 0 || degree > 60) throw DomainError("invalid triangle rule degree");
  static std::map<int, std::unique_ptr<TriangleRule>> cache;
  static std::mutex mutex;
  return memoize(cache, mutex, degree, compute_triangle_rule);
}

const std::vector<PairNode>& coincident_rule(int points_per_axis) {
  check_count(points_per_axis, "coincident rule");
  static std::map<int, std::unique_ptr<std::vector<PairNode>>> cache;
  static std::mutex mutex;
  return memoize(cache, mutex, points_per_axis, compute_coincident);
}

const std::vector<PairNode>& common_edge_rule(int points_per_axis) {
  check_count(points_per_axis, "common-edge rule");
  static std::map<int, std::unique_ptr<std::vector<PairNode>>> cache;
  static std::mutex mutex;
  return memoize(cache, mutex, points_per_axis, compute_common_edge);
}

const std::vector<PairNode>& common_vertex_rule(int points_per_axis) {
  check_count(points_per_axis, "common-vertex rule");
  static std::map<int, std::unique_ptr<std::vector<PairNode>>> cache;
  static std::mutex mutex;
  return memoize(cache, mutex, points_per_axis, compute_common_vertex);
}

}  // namespace fbem::quad
