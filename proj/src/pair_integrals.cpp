#include "fbem/pair_integrals.hpp"

#include <algorithm>
#include <cmath>

#include "fbem/errors.hpp"
#include "fbem/quadrature.hpp"

namespace fbem {

namespace {

// Reference map x = P0 + x1 (P1 - P0) + x2 (P2 - P1) on {0 <= x2 <= x1 <= 1}.
struct Affine {
  Point2 origin, c1, c2;
  double jacobian;

  explicit Affine(const std::array<Point2, 3>& v)
      : origin(v[0]), c1(v[1] - v[0]), c2(v[2] - v[1]), jacobian(std::abs(cross(v[1] - v[0], v[2] - v[1]))) {}

  Point2 operator()(double x1, double x2) const {
    return {origin.x + x1 * c1.x + x2 * c2.x, origin.y + x1 * c1.y + x2 * c2.y};
  }
};

inline std::array<double, 3> ref_basis(double x1, double x2) { return {1.0 - x1, x1 - x2, x2}; }

// Accumulates either the scalar P0 integral or the full 3x3 block.
template <bool kBlock>
struct Accumulator {
  Complex scalar = 0.0;
  LocalBlock block{};

  void add(Complex kw, double x1, double x2, double y1, double y2) {
    if constexpr (kBlock) {
      const auto lx = ref_basis(x1, x2);
      const auto ly = ref_basis(y1, y2);
      for (int i = 0; i < 3; ++i) {
        const Complex ki = kw * lx[i];
        for (int j = 0; j < 3; ++j) block[i][j] += ki * ly[j];
      }
    } else {
      scalar += kw;
    }
  }

  void scale(double s) {
    scalar *= s;
    for (auto& row : block) {
      for (auto& v : row) v *= s;
    }
  }
};

template <bool kBlock>
Accumulator<kBlock> regular_rule(const std::array<Point2, 3>& a, const std::array<Point2, 3>& b,
                                 Complex k, int degree) {
  const Affine ma(a), mb(b);
  const auto& rule = quad::triangle_rule(degree);
  const std::size_t n = rule.size();
  std::vector<Point2> pb(n);
  for (std::size_t q = 0; q < n; ++q) pb[q] = mb(rule.x1[q], rule.x2[q]);
  Accumulator<kBlock> acc;
  for (std::size_t p = 0; p < n; ++p) {
    const Point2 x = ma(rule.x1[p], rule.x2[p]);
    for (std::size_t q = 0; q < n; ++q) {
      const double r = std::hypot(x.x - pb[q].x, x.y - pb[q].y);
      if (r < kSingularRadius) throw QuadratureFailure("regular", 0.0);
      acc.add(helmholtz_radial(k, r) * (rule.w[p] * rule.w[q]), rule.x1[p], rule.x2[p], rule.x1[q],
              rule.x2[q]);
    }
  }
  acc.scale(ma.jacobian * mb.jacobian);
  return acc;
}

template <bool kBlock>
Accumulator<kBlock> coincident(const std::array<Point2, 3>& a, Complex k, int points) {
  const Affine m(a);
  Accumulator<kBlock> acc;
  for (const auto& node : quad::coincident_rule(points)) {
    const double dx = node.d1 * m.c1.x + node.d2 * m.c2.x;
    const double dy = node.d1 * m.c1.y + node.d2 * m.c2.y;
    acc.add(helmholtz_radial(k, std::hypot(dx, dy)) * node.w, node.x1, node.x2, node.y1, node.y2);
  }
  acc.scale(m.jacobian * m.jacobian);
  return acc;
}

// a = (s0, s1, a2), b = (s0, s1, b2)
template <bool kBlock>
Accumulator<kBlock> common_edge(const std::array<Point2, 3>& a, const std::array<Point2, 3>& b, Complex k,
                                int points) {
  const Affine ma(a), mb(b);
  Accumulator<kBlock> acc;
  for (const auto& node : quad::common_edge_rule(points)) {
    const double dx = node.d1 * ma.c1.x + node.x2 * ma.c2.x - node.y2 * mb.c2.x;
    const double dy = node.d1 * ma.c1.y + node.x2 * ma.c2.y - node.y2 * mb.c2.y;
    acc.add(helmholtz_radial(k, std::hypot(dx, dy)) * node.w, node.x1, node.x2, node.y1, node.y2);
  }
  acc.scale(ma.jacobian * mb.jacobian);
  return acc;
}

// a = (s, a1, a2), b = (s, b1, b2)
template <bool kBlock>
Accumulator<kBlock> common_vertex(const std::array<Point2, 3>& a, const std::array<Point2, 3>& b, Complex k,
                                  int points) {
  const Affine ma(a), mb(b);
  Accumulator<kBlock> acc;
  for (const auto& node : quad::common_vertex_rule(points)) {
    const double dx = node.x1 * ma.c1.x + node.x2 * ma.c2.x - node.y1 * mb.c1.x - node.y2 * mb.c2.x;
    const double dy = node.x1 * ma.c1.y + node.x2 * ma.c2.y - node.y1 * mb.c1.y - node.y2 * mb.c2.y;
    acc.add(helmholtz_radial(k, std::hypot(dx, dy)) * node.w, node.x1, node.x2, node.y1, node.y2);
  }
  acc.scale(ma.jacobian * mb.jacobian);
  return acc;
}

// Vertex correspondence between two triangles: perm_a / perm_b list original local
// indices in the order the regularized rule expects (shared vertices first).
struct Matching {
  PairCase pair_case = PairCase::Separated;
  std::array<int, 3> perm_a{0, 1, 2};
  std::array<int, 3> perm_b{0, 1, 2};
};

template <class Same>
Matching match_vertices(Same&& same) {
  Matching m;
  std::array<std::pair<int, int>, 3> shared{};
  int count = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (same(i, j) && count < 3) shared[count++] = {i, j};
    }
  }
  auto complete = [](std::array<int, 3>& perm, int used) {
    int slot = used;
    for (int v = 0; v < 3; ++v) {
      if (std::find(perm.begin(), perm.begin() + used, v) == perm.begin() + used) perm[slot++] = v;
    }
  };
  if (count == 3) {
    m.pair_case = PairCase::Coincident;
    for (int s = 0; s < 3; ++s) {
      m.perm_a[s] = shared[s].first;
      m.perm_b[s] = shared[s].second;
    }
  } else if (count == 2) {
    m.pair_case = PairCase::CommonEdge;
    m.perm_a = {shared[0].first, shared[1].first, 0};
    m.perm_b = {shared[0].second, shared[1].second, 0};
    complete(m.perm_a, 2);
    complete(m.perm_b, 2);
  } else if (count == 1) {
    m.pair_case = PairCase::CommonVertex;
    m.perm_a = {shared[0].first, 0, 0};
    m.perm_b = {shared[0].second, 0, 0};
    complete(m.perm_a, 1);
    complete(m.perm_b, 1);
  }
  return m;
}

double diameter(const std::array<Point2, 3>& v) {
  return std::max({norm(v[1] - v[0]), norm(v[2] - v[1]), norm(v[0] - v[2])});
}

PairCase separation_case(const std::array<Point2, 3>& a, const std::array<Point2, 3>& b,
                         const QuadratureOptions& options) {
  auto centre = [](const std::array<Point2, 3>& v) {
    return Point2{(v[0].x + v[1].x + v[2].x) / 3.0, (v[0].y + v[1].y + v[2].y) / 3.0};
  };
  auto radius = [](const std::array<Point2, 3>& v, Point2 c) {
    return std::max({norm(v[0] - c), norm(v[1] - c), norm(v[2] - c)});
  };
  const Point2 ca = centre(a), cb = centre(b);
  const double gap = norm(ca - cb) - radius(a, ca) - radius(b, cb);
  const double diam = std::max(diameter(a), diameter(b));
  return gap > options.admissibility * diam ? PairCase::Separated : PairCase::Near;
}

template <bool kBlock>
Accumulator<kBlock> singular_value(const std::array<Point2, 3>& pa, const std::array<Point2, 3>& pb,
                                   PairCase pair_case, Complex k, int points) {
  switch (pair_case) {
    case PairCase::Coincident: return coincident<kBlock>(pa, k, points);
    case PairCase::CommonEdge: return common_edge<kBlock>(pa, pb, k, points);
    default: return common_vertex<kBlock>(pa, pb, k, points);
  }
}

constexpr double kSingularTolerance = 1e-6;

template <bool kBlock>
Accumulator<kBlock> integrate(const std::array<Point2, 3>& a, const std::array<Point2, 3>& b,
                              const Matching& match, PairCase pair_case, Complex k,
                              const QuadratureOptions& options) {
  if (pair_case == PairCase::Separated || pair_case == PairCase::Near) {
    if (match.pair_case != PairCase::Separated) throw QuadratureFailure(to_string(pair_case), 0.0);
    return regular_rule<kBlock>(a, b, k,
                                pair_case == PairCase::Separated ? options.far_order : options.near_order);
  }
  if (match.pair_case != pair_case) throw QuadratureFailure(to_string(pair_case), 0.0);
  std::array<Point2, 3> pa, pb;
  for (int i = 0; i < 3; ++i) {
    pa[i] = a[match.perm_a[i]];
    pb[i] = b[match.perm_b[i]];
  }
  Accumulator<kBlock> permuted = singular_value<kBlock>(pa, pb, pair_case, k, options.singular_points);
  if (pair_case == PairCase::Coincident) {
    // Self-check of the regularized rule against a two-point-richer rule.
    const auto check = singular_value<false>(pa, pb, pair_case, k, options.singular_points + 2);
    const Complex base = kBlock ? Complex(0.0) : permuted.scalar;
    Complex value = base;
    if constexpr (kBlock) {
      for (const auto& row : permuted.block) {
        for (const auto& v : row) value += v;
      }
    }
    const double estimate = std::abs(value - check.scalar) / std::abs(check.scalar);
    if (!(estimate <= kSingularTolerance)) throw QuadratureFailure("coincident", estimate);
  }
  if constexpr (!kBlock) {
    return permuted;
  } else {
    Accumulator<kBlock> result;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) result.block[match.perm_a[i]][match.perm_b[j]] = permuted.block[i][j];
    }
    return result;
  }
}

Matching geometric_matching(const Triangle& a, const Triangle& b, double vertex_tol) {
  const double tol = vertex_tol * std::max(diameter(a.vertices), diameter(b.vertices));
  return match_vertices([&](int i, int j) { return norm(a.vertices[i] - b.vertices[j]) <= tol; });
}

Matching mesh_matching(const Mesh& mesh, std::size_t a, std::size_t b) {
  const auto& ta = mesh.elements[a];
  const auto& tb = mesh.elements[b];
  return match_vertices([&](int i, int j) { return ta[i] == tb[j]; });
}

}  // namespace

std::string to_string(PairCase c) {
  switch (c) {
    case PairCase::Separated: return "separated";
    case PairCase::Near: return "near";
    case PairCase::CommonVertex: return "common-vertex";
    case PairCase::CommonEdge: return "common-edge";
    case PairCase::Coincident: return "coincident";
  }
  return "separated";
}

Triangle element_triangle(const Mesh& mesh, std::size_t e) {
  const auto& t = mesh.elements[e];
  return {{mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]}};
}

PairCase classify_pair(const Triangle& a, const Triangle& b, const QuadratureOptions& options,
                       double vertex_tol) {
  const Matching m = geometric_matching(a, b, vertex_tol);
  if (m.pair_case != PairCase::Separated) return m.pair_case;
  return separation_case(a.vertices, b.vertices, options);
}

Complex panel_pair_integral(const Triangle& a, const Triangle& b, const Wavenumber& k, PairCase rule,
                            const QuadratureOptions& options) {
  const Matching m = geometric_matching(a, b, 1e-12);
  return integrate<false>(a.vertices, b.vertices, m, rule, k.value(), options).scalar;
}

Complex panel_pair_integral(const Triangle& a, const Triangle& b, const Wavenumber& k,
                            const QuadratureOptions& options) {
  return panel_pair_integral(a, b, k, classify_pair(a, b, options), options);
}

LocalBlock panel_pair_block(const Triangle& a, const Triangle& b, const Wavenumber& k,
                            const QuadratureOptions& options) {
  const Matching m = geometric_matching(a, b, 1e-12);
  const PairCase c = m.pair_case != PairCase::Separated ? m.pair_case
                                                        : separation_case(a.vertices, b.vertices, options);
  return integrate<true>(a.vertices, b.vertices, m, c, k.value(), options).block;
}

PairCase classify_elements(const Mesh& mesh, std::size_t a, std::size_t b, const QuadratureOptions& options) {
  const Matching m = mesh_matching(mesh, a, b);
  if (m.pair_case != PairCase::Separated) return m.pair_case;
  return separation_case(element_triangle(mesh, a).vertices, element_triangle(mesh, b).vertices, options);
}

Complex element_pair_integral(const Mesh& mesh, std::size_t a, std::size_t b, const Wavenumber& k,
                              const QuadratureOptions& options) {
  const Matching m = mesh_matching(mesh, a, b);
  const auto ta = element_triangle(mesh, a).vertices;
  const auto tb = element_triangle(mesh, b).vertices;
  const PairCase c = m.pair_case != PairCase::Separated ? m.pair_case : separation_case(ta, tb, options);
  return integrate<false>(ta, tb, m, c, k.value(), options).scalar;
}

LocalBlock element_pair_block(const Mesh& mesh, std::size_t a, std::size_t b, const Wavenumber& k,
                              const QuadratureOptions& options) {
  const Matching m = mesh_matching(mesh, a, b);
  const auto ta = element_triangle(mesh, a).vertices;
  const auto tb = element_triangle(mesh, b).vertices;
  const PairCase c = m.pair_case != PairCase::Separated ? m.pair_case : separation_case(ta, tb, options);
  return integrate<true>(ta, tb, m, c, k.value(), options).block;
}

}  // namespace fbem
