#pragma once

#include <Eigen/Sparse>
#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "fbem/geometry.hpp"

namespace fbem {

inline constexpr std::size_t kDefaultElementCap = 20000;

/// Conforming triangulation of a PanelSet. Elements never cross panel boundaries.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> elements;  // counterclockwise
  std::vector<int> element_panel;
  std::vector<bool> boundary_vertex;  // lies on the boundary of (some) panel
  double h = 0.0;                     // largest element diameter

  std::size_t num_elements() const { return elements.size(); }
  std::size_t num_vertices() const { return vertices.size(); }
  double element_area(std::size_t e) const;
  Point2 centroid(std::size_t e) const;
  double element_diameter(std::size_t e) const;
  double area() const;
};

/// Splits every square into 2 * 4^refine triangles and every triangle into 4^refine.
Mesh mesh_panels(const PanelSet& screen, int refine, std::size_t element_cap = kDefaultElementCap);

/// Uniform subdivision with `divisions` cells per panel side (squares: 2 n^2 elements,
/// triangles: n^2). mesh_panels(screen, r) equals mesh_with_divisions(screen, 2^r).
Mesh mesh_with_divisions(const PanelSet& screen, int divisions,
                         std::size_t element_cap = kDefaultElementCap);

std::size_t projected_element_count(const PanelSet& screen, int divisions);

enum class SpaceKind {
  P0Jump,       // piecewise constants, approximates H~^{-1/2}
  P1ZeroTrace,  // continuous piecewise linears vanishing on the screen boundary, H~^{1/2}
};

std::string to_string(SpaceKind kind);

/// Discrete function space on an immutable mesh.
class FunctionSpace {
 public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  std::size_t dof_count() const { return dof_count_; }

  /// P0: the element index. P1: the vertex index.
  int dof_entity(std::size_t dof) const { return dof_entity_[dof]; }
  /// P1 only: dof of a vertex, or -1 for excluded (boundary) vertices.
  int vertex_dof(std::size_t vertex) const { return vertex_dof_[vertex]; }
  /// Local-to-global map: dofs of the element's vertices (P1) or the element itself (P0).
  std::array<int, 3> element_dofs(std::size_t e) const;

  /// Integral of each basis function over the screen.
  std::vector<double> basis_integrals() const;

  /// Evaluates sum_p coeffs[p] psi_p at `point` (0 outside the mesh).
  std::complex<double> evaluate(std::span<const std::complex<double>> coeffs, Point2 point) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  SpaceKind kind_;
  std::size_t dof_count_ = 0;
  std::vector<int> dof_entity_;
  std::vector<int> vertex_dof_;
};

/// Builds the space and rejects an empty P1 space.
FunctionSpace build_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

/// Bucket grid for locating the element that contains a point.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);
  /// Index of an element whose closure contains `p`, or -1.
  int locate(Point2 p, double rel_tol = 1e-10) const;
  /// Barycentric coordinates of p in element e.
  std::array<double, 3> barycentric(int e, Point2 p) const;

 private:
  const Mesh& mesh_;
  Point2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Embedding matrix P (fine dofs x coarse dofs) of a coarse space into a finer space on a
/// refined (possibly larger) screen: coarse basis function q equals sum_f P(f, q) psi_f.
/// Throws DomainError if the coarse space does not embed.
Eigen::SparseMatrix<double> prolongation(const FunctionSpace& coarse, const FunctionSpace& fine);

}  // namespace fbem
