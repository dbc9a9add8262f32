#include "fbem/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "fbem/errors.hpp"

namespace fbem {

double norm(Point2 a) { return std::hypot(a.x, a.y); }

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Barycentric coordinates of p with respect to t.
std::array<double, 3> barycentric(const Triangle& t, Point2 p) {
  const auto& v = t.vertices;
  const double det = cross(v[1] - v[0], v[2] - v[0]);
  const double l1 = cross(p - v[0], v[2] - v[0]) / det;
  const double l2 = cross(v[1] - v[0], p - v[0]) / det;
  return {1.0 - l1 - l2, l1, l2};
}

// Point of the equilateral lattice spanned by (1, 0) and (1/2, sqrt(3)/2), scaled by 2^-exponent.
Point2 lattice_point(std::int64_t a, std::int64_t b, int exponent) {
  static const double kHalfSqrt3 = std::sqrt(3.0) / 2.0;
  const double scale = std::ldexp(1.0, -exponent);
  return {(static_cast<double>(a) + 0.5 * static_cast<double>(b)) * scale,
          static_cast<double>(b) * kHalfSqrt3 * scale};
}

struct LatticeTriangle {
  std::int64_t a, b;  // lower-left corner of an upward triangle with unit lattice side
  int exponent;
};

Triangle up_triangle(const LatticeTriangle& t) {
  return {{lattice_point(t.a, t.b, t.exponent), lattice_point(t.a + 1, t.b, t.exponent),
           lattice_point(t.a, t.b + 1, t.exponent)}};
}

// Middle inverted triangle of an upward lattice triangle.
Triangle hole_of(const LatticeTriangle& t) {
  const int e = t.exponent + 1;
  return {{lattice_point(2 * t.a + 1, 2 * t.b, e), lattice_point(2 * t.a + 1, 2 * t.b + 1, e),
           lattice_point(2 * t.a, 2 * t.b + 1, e)}};
}

std::vector<LatticeTriangle> gasket_triangles(int level) {
  std::vector<LatticeTriangle> current{{0, 0, 0}};
  for (int j = 0; j < level; ++j) {
    std::vector<LatticeTriangle> next;
    next.reserve(current.size() * 3);
    for (const auto& t : current) {
      next.push_back({2 * t.a, 2 * t.b, t.exponent + 1});
      next.push_back({2 * t.a + 1, 2 * t.b, t.exponent + 1});
      next.push_back({2 * t.a, 2 * t.b + 1, t.exponent + 1});
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace

double panel_area(const Panel& panel) {
  return std::visit(Overloaded{[](const Square& s) { return s.side * s.side; },
                               [](const Triangle& t) {
                                 const auto& v = t.vertices;
                                 return 0.5 * std::abs(cross(v[1] - v[0], v[2] - v[0]));
                               }},
                    panel);
}

bool panel_contains(const Panel& panel, Point2 p, double rel_tol) {
  return std::visit(Overloaded{[&](const Square& s) {
                                 const double tol = rel_tol * s.side;
                                 return p.x >= s.corner.x - tol && p.x <= s.corner.x + s.side + tol &&
                                        p.y >= s.corner.y - tol && p.y <= s.corner.y + s.side + tol;
                               },
                               [&](const Triangle& t) {
                                 const auto l = barycentric(t, p);
                                 return l[0] >= -rel_tol && l[1] >= -rel_tol && l[2] >= -rel_tol;
                               }},
                    panel);
}

bool panel_boundary_contains(const Panel& panel, Point2 p, double rel_tol) {
  if (!panel_contains(panel, p, rel_tol)) return false;
  return std::visit(Overloaded{[&](const Square& s) {
                                 const double tol = rel_tol * s.side;
                                 return std::abs(p.x - s.corner.x) <= tol ||
                                        std::abs(p.x - s.corner.x - s.side) <= tol ||
                                        std::abs(p.y - s.corner.y) <= tol ||
                                        std::abs(p.y - s.corner.y - s.side) <= tol;
                               },
                               [&](const Triangle& t) {
                                 const auto l = barycentric(t, p);
                                 return std::abs(l[0]) <= rel_tol || std::abs(l[1]) <= rel_tol ||
                                        std::abs(l[2]) <= rel_tol;
                               }},
                    panel);
}

std::string to_string(Family family) {
  switch (family) {
    case Family::CantorDust: return "cantor_dust";
    case Family::SierpinskiComplement: return "sierpinski_complement";
    case Family::SierpinskiGasket: return "sierpinski_gasket";
    case Family::Custom: return "custom";
  }
  return "custom";
}

Family family_from_string(const std::string& name) {
  if (name == "cantor_dust" || name == "cantor") return Family::CantorDust;
  if (name == "sierpinski_complement" || name == "complement") return Family::SierpinskiComplement;
  if (name == "sierpinski_gasket" || name == "gasket" || name == "sierpinski") {
    return Family::SierpinskiGasket;
  }
  if (name == "custom") return Family::Custom;
  throw ConfigError("unknown family '" + name + "'");
}

double PanelSet::area() const {
  double total = 0.0;
  for (const auto& p : panels) total += panel_area(p);
  return total;
}

double containing_radius(const std::vector<Panel>& panels) {
  double r = 0.0;
  for (const auto& panel : panels) {
    std::visit(Overloaded{[&](const Square& s) {
                            for (double dx : {0.0, s.side}) {
                              for (double dy : {0.0, s.side}) {
                                r = std::max(r, norm(s.corner + Point2{dx, dy}));
                              }
                            }
                          },
                          [&](const Triangle& t) {
                            for (const auto& v : t.vertices) r = std::max(r, norm(v));
                          }},
               panel);
  }
  return r * (1.0 + 1e-9) + 1e-12;
}

PanelSet make_panel_set(std::vector<Panel> panels, Openness openness) {
  PanelSet set;
  set.panels = std::move(panels);
  set.openness = openness;
  set.containing_radius = containing_radius(set.panels);
  return set;
}

void PrefractalSpec::validate() const {
  if (level < 0) throw DomainError("prefractal level must be nonnegative");
  if (family == Family::CantorDust && !(alpha > 0.0 && alpha < 0.5)) {
    throw DomainError("Cantor dust ratio alpha must lie in (0, 1/2)");
  }
  if (family == Family::SierpinskiComplement && level < 1) {
    throw DomainError("Sierpinski complement screen requires level >= 1");
  }
  if (family == Family::Custom) throw DomainError("custom panel sets have no prefractal spec");
}

PanelSet cantor_dust_prefractal(double alpha, int level) {
  PrefractalSpec{Family::CantorDust, alpha, level}.validate();
  if (level > 15) throw CapacityError("Cantor dust level above 15 is not supported");

  // Corners are decoded from binary addresses: digit i contributes (1 - alpha) alpha^i.
  const std::uint32_t per_axis = 1u << level;
  std::vector<double> offset(per_axis, 0.0);
  for (std::uint32_t address = 0; address < per_axis; ++address) {
    double x = 0.0;
    double scale = 1.0;
    for (int i = 0; i < level; ++i) {
      if ((address >> (level - 1 - i)) & 1u) x += (1.0 - alpha) * scale;
      scale *= alpha;
    }
    offset[address] = x;
  }
  double side = 1.0;
  for (int i = 0; i < level; ++i) side *= alpha;

  // Recursive ordering: the children of square q at level j are 4q..4q+3 at level j+1.
  std::vector<Panel> panels;
  panels.reserve(std::size_t{1} << (2 * level));
  const std::uint32_t count = 1u << (2 * level);
  for (std::uint32_t index = 0; index < count; ++index) {
    std::uint32_t ax = 0, ay = 0;
    for (int i = 0; i < level; ++i) {
      const std::uint32_t quad = (index >> (2 * (level - 1 - i))) & 3u;
      ax = (ax << 1) | (quad & 1u);
      ay = (ay << 1) | (quad >> 1);
    }
    panels.emplace_back(Square{{offset[ax], offset[ay]}, side});
  }
  PanelSet set = make_panel_set(std::move(panels), Openness::ClosedSet);
  set.family = Family::CantorDust;
  set.level = level;
  set.alpha = alpha;
  return set;
}

PanelSet sierpinski_prefractal(int level) {
  PrefractalSpec{Family::SierpinskiGasket, 0.0, level}.validate();
  if (level > 10) throw CapacityError("Sierpinski level above 10 is not supported");
  std::vector<Panel> panels;
  for (const auto& t : gasket_triangles(level)) panels.emplace_back(up_triangle(t));
  PanelSet set = make_panel_set(std::move(panels), Openness::ClosedSet);
  set.family = Family::SierpinskiGasket;
  set.level = level;
  return set;
}

PanelSet sierpinski_complement_screen(int level) {
  PrefractalSpec{Family::SierpinskiComplement, 0.0, level}.validate();
  if (level > 10) throw CapacityError("Sierpinski level above 10 is not supported");
  std::vector<Panel> panels;
  for (int m = 0; m < level; ++m) {
    for (const auto& t : gasket_triangles(m)) panels.emplace_back(hole_of(t));
  }
  PanelSet set = make_panel_set(std::move(panels), Openness::OpenScreen);
  set.family = Family::SierpinskiComplement;
  set.level = level;
  return set;
}

PanelSet sierpinski_base_screen() {
  PanelSet set = make_panel_set({up_triangle({0, 0, 0})}, Openness::OpenScreen);
  set.family = Family::SierpinskiGasket;
  set.level = 0;
  return set;
}

PanelSet generate(const PrefractalSpec& spec) {
  switch (spec.family) {
    case Family::CantorDust: return cantor_dust_prefractal(spec.alpha, spec.level);
    case Family::SierpinskiGasket: return sierpinski_prefractal(spec.level);
    case Family::SierpinskiComplement: return sierpinski_complement_screen(spec.level);
    case Family::Custom: break;
  }
  throw DomainError("cannot generate a custom family");
}

std::string to_string(Nullity nullity) {
  switch (nullity) {
    case Nullity::Null: return "Null";
    case Nullity::NotNull: return "NotNull";
    case Nullity::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

Nullity nullity_prediction(double dim, double s) {
  if (!(s >= -1.0 && s <= 0.0)) throw DomainError("nullity prediction requires -1 <= s <= 0");
  if (!(dim >= 0.0 && dim <= 2.0)) throw DomainError("dimension must lie in [0, 2]");
  const double threshold = 2.0 + 2.0 * s;
  if (std::abs(dim - threshold) <= 1e-12) return Nullity::Indeterminate;
  return dim < threshold ? Nullity::Null : Nullity::NotNull;
}

DimensionReport similarity_dimension(const PrefractalSpec& spec) {
  if (spec.family == Family::CantorDust && !(spec.alpha > 0.0 && spec.alpha < 0.5)) {
    throw DomainError("Cantor dust ratio alpha must lie in (0, 1/2)");
  }
  if (spec.family == Family::Custom) throw DomainError("custom panel sets have no dimension");
  if (spec.level < 0) throw DomainError("prefractal level must be nonnegative");
  DimensionReport report;
  if (spec.family == Family::CantorDust) {
    report.hausdorff_dim = std::log(4.0) / std::log(1.0 / spec.alpha);
  } else {
    report.hausdorff_dim = std::log(3.0) / std::log(2.0);
  }
  report.threshold_s = (report.hausdorff_dim - 2.0) / 2.0;
  report.prediction = nullity_prediction(report.hausdorff_dim, -0.5);
  return report;
}

}  // namespace fbem
