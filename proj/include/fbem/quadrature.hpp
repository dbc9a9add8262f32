#pragma once

#include <vector>

namespace fbem::quad {

/// Rule on [0, 1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [0, 1] (cached; safe to call concurrently).
const Rule1D& gauss_legendre(int n);

/// n-point Gauss rule on [0, 1] for the weight function u (exact for degree 2n - 1).
const Rule1D& gauss_jacobi_u(int n);

/// Rule on the reference triangle {0 <= x2 <= x1 <= 1}; weights sum to 1/2.
struct TriangleRule {
  std::vector<double> x1, x2, w;
  std::size_t size() const { return w.size(); }
};

/// Conical product rule exact for polynomials of total degree <= `degree`.
const TriangleRule& triangle_rule(int degree);

/// One node of a regularized 4-D rule on the product of two reference triangles.
/// d1, d2 hold x - y computed without cancellation: both for the coincident rule, d1 only
/// for the common-edge rule, neither for the common-vertex rule (left zero).
struct PairNode {
  double x1, x2, y1, y2;
  double d1, d2;
  double w;
};

/// Coincident reference triangles (six simplices, Duffy-type collapse).
const std::vector<PairNode>& coincident_rule(int points_per_axis);
/// Triangles sharing the edge {x2 = 0} (parametrized identically in both).
const std::vector<PairNode>& common_edge_rule(int points_per_axis);
/// Triangles sharing the vertex (0, 0).
const std::vector<PairNode>& common_vertex_rule(int points_per_axis);

}  // namespace fbem::quad
