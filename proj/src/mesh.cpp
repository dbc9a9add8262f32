#include "fbem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fbem/errors.hpp"

namespace fbem {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Merges coincident vertices across panels (touch points), tolerance kSnap.
class VertexPool {
 public:
  int insert(Point2 p, bool on_boundary) {
    const std::int64_t kx = std::llround(p.x / kSnap);
    const std::int64_t ky = std::llround(p.y / kSnap);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = index_.find(key(kx + dx, ky + dy));
        if (it == index_.end()) continue;
        for (int v : it->second) {
          if (std::abs(vertices[v].x - p.x) <= 2 * kSnap && std::abs(vertices[v].y - p.y) <= 2 * kSnap) {
            boundary[v] = boundary[v] || on_boundary;
            return v;
          }
        }
      }
    }
    const int v = static_cast<int>(vertices.size());
    vertices.push_back(p);
    boundary.push_back(on_boundary);
    index_[key(kx, ky)].push_back(v);
    return v;
  }

  std::vector<Point2> vertices;
  std::vector<bool> boundary;

 private:
  static constexpr double kSnap = 1e-12;
  static std::uint64_t key(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
  }
  std::unordered_map<std::uint64_t, std::vector<int>> index_;
};

void mesh_square(const Square& s, int n, int panel, VertexPool& pool, Mesh& mesh) {
  std::vector<int> ids((n + 1) * (n + 1));
  const double step = s.side / n;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const Point2 p{s.corner.x + i * step, s.corner.y + j * step};
      const bool on_boundary = i == 0 || j == 0 || i == n || j == n;
      ids[j * (n + 1) + i] = pool.insert(p, on_boundary);
    }
  }
  auto id = [&](int i, int j) { return ids[j * (n + 1) + i]; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      mesh.element_panel.push_back(panel);
      mesh.element_panel.push_back(panel);
    }
  }
}

void mesh_triangle(const Triangle& t, int n, int panel, VertexPool& pool, Mesh& mesh) {
  const auto& v = t.vertices;
  const Point2 e1 = v[1] - v[0];
  const Point2 e2 = v[2] - v[0];
  std::vector<int> ids((n + 1) * (n + 2) / 2);
  auto slot = [n](int i, int j) { return j * (n + 1) - j * (j - 1) / 2 + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i + j <= n; ++i) {
      const Point2 p{v[0].x + (i * e1.x + j * e2.x) / n, v[0].y + (i * e1.y + j * e2.y) / n};
      const bool on_boundary = i == 0 || j == 0 || i + j == n;
      ids[slot(i, j)] = pool.insert(p, on_boundary);
    }
  }
  auto id = [&](int i, int j) { return ids[slot(i, j)]; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i + j < n; ++i) {
      mesh.elements.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      mesh.element_panel.push_back(panel);
      if (i + j < n - 1) {
        mesh.elements.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        mesh.element_panel.push_back(panel);
      }
    }
  }
}

}  // namespace

double Mesh::element_area(std::size_t e) const {
  const auto& t = elements[e];
  return 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
}

Point2 Mesh::centroid(std::size_t e) const {
  const auto& t = elements[e];
  const Point2 s = vertices[t[0]] + vertices[t[1]] + vertices[t[2]];
  return {s.x / 3.0, s.y / 3.0};
}

double Mesh::element_diameter(std::size_t e) const {
  const auto& t = elements[e];
  return std::max({norm(vertices[t[1]] - vertices[t[0]]), norm(vertices[t[2]] - vertices[t[1]]),
                   norm(vertices[t[0]] - vertices[t[2]])});
}

double Mesh::area() const {
  double total = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e) total += element_area(e);
  return total;
}

std::size_t projected_element_count(const PanelSet& screen, int divisions) {
  const auto n = static_cast<std::size_t>(divisions);
  std::size_t count = 0;
  for (const auto& panel : screen.panels) {
    count += std::holds_alternative<Square>(panel) ? 2 * n * n : n * n;
  }
  return count;
}

Mesh mesh_with_divisions(const PanelSet& screen, int divisions, std::size_t element_cap) {
  if (screen.empty()) throw DomainError("cannot mesh an empty screen");
  if (divisions < 1) throw DomainError("mesh divisions must be positive");
  const std::size_t projected = projected_element_count(screen, divisions);
  if (projected > element_cap) {
    throw CapacityError("mesh would have " + std::to_string(projected) + " elements (cap " +
                        std::to_string(element_cap) + ")");
  }
  Mesh mesh;
  mesh.elements.reserve(projected);
  VertexPool pool;
  for (std::size_t p = 0; p < screen.panels.size(); ++p) {
    std::visit(Overloaded{[&](const Square& s) { mesh_square(s, divisions, static_cast<int>(p), pool, mesh); },
                          [&](const Triangle& t) {
                            mesh_triangle(t, divisions, static_cast<int>(p), pool, mesh);
                          }},
               screen.panels[p]);
  }
  mesh.vertices = std::move(pool.vertices);
  mesh.boundary_vertex = std::move(pool.boundary);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    mesh.h = std::max(mesh.h, mesh.element_diameter(e));
  }
  return mesh;
}

Mesh mesh_panels(const PanelSet& screen, int refine, std::size_t element_cap) {
  if (refine < 0) throw DomainError("refine must be nonnegative");
  if (refine > 12) throw CapacityError("refine above 12 is not supported");
  return mesh_with_divisions(screen, 1 << refine, element_cap);
}

std::string to_string(SpaceKind kind) {
  return kind == SpaceKind::P0Jump ? "P0_Jump" : "P1_ZeroTrace";
}

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind)
    : mesh_(std::move(mesh)), kind_(kind) {
  if (kind_ == SpaceKind::P0Jump) {
    dof_count_ = mesh_->num_elements();
    dof_entity_.resize(dof_count_);
    for (std::size_t e = 0; e < dof_count_; ++e) dof_entity_[e] = static_cast<int>(e);
  } else {
    vertex_dof_.assign(mesh_->num_vertices(), -1);
    for (std::size_t v = 0; v < mesh_->num_vertices(); ++v) {
      if (mesh_->boundary_vertex[v]) continue;
      vertex_dof_[v] = static_cast<int>(dof_entity_.size());
      dof_entity_.push_back(static_cast<int>(v));
    }
    dof_count_ = dof_entity_.size();
  }
}

std::array<int, 3> FunctionSpace::element_dofs(std::size_t e) const {
  if (kind_ == SpaceKind::P0Jump) return {static_cast<int>(e), -1, -1};
  const auto& t = mesh_->elements[e];
  return {vertex_dof_[t[0]], vertex_dof_[t[1]], vertex_dof_[t[2]]};
}

std::vector<double> FunctionSpace::basis_integrals() const {
  std::vector<double> result(dof_count_, 0.0);
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const double area = mesh_->element_area(e);
    const auto dofs = element_dofs(e);
    if (kind_ == SpaceKind::P0Jump) {
      result[e] += area;
    } else {
      for (int d : dofs) {
        if (d >= 0) result[d] += area / 3.0;
      }
    }
  }
  return result;
}

std::complex<double> FunctionSpace::evaluate(std::span<const std::complex<double>> coeffs,
                                             Point2 point) const {
  const PointLocator locator(*mesh_);
  const int e = locator.locate(point);
  if (e < 0) return 0.0;
  if (kind_ == SpaceKind::P0Jump) return coeffs[e];
  const auto lambda = locator.barycentric(e, point);
  const auto dofs = element_dofs(e);
  std::complex<double> value = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (dofs[i] >= 0) value += lambda[i] * coeffs[dofs[i]];
  }
  return value;
}

FunctionSpace build_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind) {
  FunctionSpace space(std::move(mesh), kind);
  if (space.dof_count() == 0) {
    throw EmptySpaceError("function space " + to_string(kind) +
                          " has no degrees of freedom; increase refine");
  }
  return space;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
  if (mesh.vertices.empty()) return;
  Point2 hi = mesh.vertices.front();
  lo_ = hi;
  for (const auto& v : mesh.vertices) {
    lo_ = {std::min(lo_.x, v.x), std::min(lo_.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  const double extent = std::max({hi.x - lo_.x, hi.y - lo_.y, 1e-300});
  const int cells = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_elements()))));
  cell_ = extent / cells;
  nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo_.x) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo_.y) / cell_)) + 1);
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.elements[e];
    double x0 = mesh.vertices[t[0]].x, x1 = x0, y0 = mesh.vertices[t[0]].y, y1 = y0;
    for (int i = 1; i < 3; ++i) {
      x0 = std::min(x0, mesh.vertices[t[i]].x);
      x1 = std::max(x1, mesh.vertices[t[i]].x);
      y0 = std::min(y0, mesh.vertices[t[i]].y);
      y1 = std::max(y1, mesh.vertices[t[i]].y);
    }
    const double pad = 1e-9 * cell_;
    const int i0 = std::clamp(static_cast<int>(std::floor((x0 - pad - lo_.x) / cell_)), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor((x1 + pad - lo_.x) / cell_)), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor((y0 - pad - lo_.y) / cell_)), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor((y1 + pad - lo_.y) / cell_)), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(e));
    }
  }
}

std::array<double, 3> PointLocator::barycentric(int e, Point2 p) const {
  const auto& t = mesh_.elements[e];
  const Point2 a = mesh_.vertices[t[0]], b = mesh_.vertices[t[1]], c = mesh_.vertices[t[2]];
  const double det = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / det;
  const double l2 = cross(b - a, p - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

int PointLocator::locate(Point2 p, double rel_tol) const {
  if (buckets_.empty()) return -1;
  const int i = static_cast<int>(std::floor((p.x - lo_.x) / cell_));
  const int j = static_cast<int>(std::floor((p.y - lo_.y) / cell_));
  if (i < -1 || j < -1 || i > nx_ || j > ny_) return -1;
  const int ci = std::clamp(i, 0, nx_ - 1);
  const int cj = std::clamp(j, 0, ny_ - 1);
  for (int e : buckets_[static_cast<std::size_t>(cj) * nx_ + ci]) {
    const auto l = barycentric(e, p);
    if (l[0] >= -rel_tol && l[1] >= -rel_tol && l[2] >= -rel_tol) return e;
  }
  return -1;
}

Eigen::SparseMatrix<double> prolongation(const FunctionSpace& coarse, const FunctionSpace& fine) {
  if (coarse.kind() != fine.kind()) throw SpaceKindError("prolongation between different space kinds");
  const Mesh& cm = coarse.mesh();
  const Mesh& fm = fine.mesh();
  const PointLocator locator(cm);
  std::vector<Eigen::Triplet<double>> triplets;

  if (coarse.kind() == SpaceKind::P0Jump) {
    std::vector<double> covered(cm.num_elements(), 0.0);
    for (std::size_t f = 0; f < fm.num_elements(); ++f) {
      const int e = locator.locate(fm.centroid(f), 1e-12);
      if (e < 0) continue;
      triplets.emplace_back(static_cast<int>(f), e, 1.0);
      covered[e] += fm.element_area(f);
    }
    for (std::size_t e = 0; e < cm.num_elements(); ++e) {
      if (std::abs(covered[e] - cm.element_area(e)) > 1e-9 * cm.element_area(e)) {
        throw DomainError("coarse P0 space does not embed: element " + std::to_string(e) +
                          " is not a union of fine elements");
      }
    }
  } else {
    for (std::size_t f = 0; f < fm.num_elements(); ++f) {
      const auto& t = fm.elements[f];
      const int e = locator.locate(fm.centroid(f), 1e-12);
      if (e < 0) continue;
      for (int i = 0; i < 3; ++i) {
        const auto l = locator.barycentric(e, fm.vertices[t[i]]);
        if (*std::min_element(l.begin(), l.end()) < -1e-9) {
          throw DomainError("coarse P1 space does not embed: fine element crosses a coarse element");
        }
      }
    }
    for (std::size_t v = 0; v < fm.num_vertices(); ++v) {
      const int e = locator.locate(fm.vertices[v], 1e-10);
      if (e < 0) continue;
      const auto l = locator.barycentric(e, fm.vertices[v]);
      const auto cdofs = coarse.element_dofs(e);
      const int fdof = fine.vertex_dof(v);
      for (int i = 0; i < 3; ++i) {
        if (cdofs[i] < 0 || std::abs(l[i]) < 1e-12) continue;
        if (fdof < 0) {
          throw DomainError("coarse P1 space does not embed: nonzero on an excluded fine vertex");
        }
        triplets.emplace_back(fdof, cdofs[i], l[i]);
      }
    }
  }
  Eigen::SparseMatrix<double> p(static_cast<Eigen::Index>(fine.dof_count()),
                                static_cast<Eigen::Index>(coarse.dof_count()));
  p.setFromTriplets(triplets.begin(), triplets.end(), [](double a, double) { return a; });
  return p;
}

}  // namespace fbem
