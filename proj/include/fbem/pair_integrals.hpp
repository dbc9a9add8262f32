#pragma once

#include <array>
#include <string>

#include "fbem/geometry.hpp"
#include "fbem/kernel.hpp"
#include "fbem/mesh.hpp"

namespace fbem {

/// Quadrature orders for element-pair integrals.
struct QuadratureOptions {
  int far_order = 7;           // polynomial degree, separated pairs
  int near_order = 10;         // polynomial degree, close but disjoint pairs
  int singular_points = 10;    // Gauss points per axis of the regularized 4-D rules
  double admissibility = 2.0;  // separated iff distance / diameter > admissibility
};

enum class PairCase { Separated, Near, CommonVertex, CommonEdge, Coincident };

std::string to_string(PairCase c);

/// Local 3x3 block  L[i][j] = int_{Ta} int_{Tb} Phi(x, y) lambda_i(x) lambda_j(y),
/// indexed by the triangles' own vertex order. The P0 integral is the sum of all entries.
using LocalBlock = std::array<std::array<Complex, 3>, 3>;

/// Classifies two triangles. Shared vertices are detected by coordinate equality up to
/// `vertex_tol` times the larger diameter.
PairCase classify_pair(const Triangle& a, const Triangle& b, const QuadratureOptions& options,
                       double vertex_tol = 1e-12);

/// int_{Ta} int_{Tb} Phi(x, y) ds(y) ds(x).
Complex panel_pair_integral(const Triangle& a, const Triangle& b, const Wavenumber& k,
                            const QuadratureOptions& options = {});

/// Same integral with an explicit case. Throws QuadratureFailure if the requested case
/// is inconsistent with the geometry (e.g. Separated for touching triangles).
Complex panel_pair_integral(const Triangle& a, const Triangle& b, const Wavenumber& k, PairCase rule,
                            const QuadratureOptions& options = {});

LocalBlock panel_pair_block(const Triangle& a, const Triangle& b, const Wavenumber& k,
                            const QuadratureOptions& options = {});

/// Mesh-based variants: shared vertices come from the connectivity.
PairCase classify_elements(const Mesh& mesh, std::size_t a, std::size_t b,
                           const QuadratureOptions& options);
Complex element_pair_integral(const Mesh& mesh, std::size_t a, std::size_t b, const Wavenumber& k,
                              const QuadratureOptions& options);
LocalBlock element_pair_block(const Mesh& mesh, std::size_t a, std::size_t b, const Wavenumber& k,
                              const QuadratureOptions& options);

Triangle element_triangle(const Mesh& mesh, std::size_t e);

}  // namespace fbem
