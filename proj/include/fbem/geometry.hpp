#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace fbem {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 a);

/// Axis-aligned square [x, x + side] x [y, y + side].
struct Square {
  Point2 corner;
  double side = 0.0;
};

/// Triangle with counterclockwise vertices.
struct Triangle {
  std::array<Point2, 3> vertices;
};

using Panel = std::variant<Square, Triangle>;

double panel_area(const Panel& panel);
/// True if `p` lies in the closed panel (tolerance relative to the panel size).
bool panel_contains(const Panel& panel, Point2 p, double rel_tol = 1e-12);
/// True if `p` lies on the boundary of the panel.
bool panel_boundary_contains(const Panel& panel, Point2 p, double rel_tol = 1e-12);

enum class Openness { OpenScreen, ClosedSet };

enum class Family { CantorDust, SierpinskiComplement, SierpinskiGasket, Custom };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// A planar screen given as a finite union of panels with pairwise disjoint interiors.
struct PanelSet {
  Family family = Family::Custom;
  int level = 0;
  double alpha = 0.0;  // CantorDust only
  std::vector<Panel> panels;
  Openness openness = Openness::OpenScreen;
  double containing_radius = 0.0;  // every panel lies in {|x| < R}

  bool empty() const { return panels.empty(); }
  std::size_t size() const { return panels.size(); }
  double area() const;
};

/// Builds a custom PanelSet and fills in the containing radius.
PanelSet make_panel_set(std::vector<Panel> panels, Openness openness = Openness::OpenScreen);

/// Recomputes the containing radius from the panel vertices.
double containing_radius(const std::vector<Panel>& panels);

struct PrefractalSpec {
  Family family = Family::CantorDust;
  double alpha = 1.0 / 3.0;  // CantorDust only
  int level = 0;

  void validate() const;
};

/// 4^j closed squares of side alpha^j: the level-j Cantor dust E_j x E_j.
PanelSet cantor_dust_prefractal(double alpha, int level);

/// 3^j closed triangles of side 2^-j: the level-j Sierpinski gasket prefractal.
PanelSet sierpinski_prefractal(int level);

/// Open screen F_0 \ F_j: the (3^j - 1)/2 inverted triangles removed up to level j,
/// ordered coarsest level first so that level j is a prefix of level j + 1.
PanelSet sierpinski_complement_screen(int level);

/// The base triangle F_0 as an open screen.
PanelSet sierpinski_base_screen();

PanelSet generate(const PrefractalSpec& spec);

enum class Nullity { Null, NotNull, Indeterminate };

std::string to_string(Nullity nullity);

struct DimensionReport {
  double hausdorff_dim = 0.0;
  double threshold_s = 0.0;  // (dim - 2) / 2
  Nullity prediction = Nullity::Indeterminate;  // at s = -1/2
};

DimensionReport similarity_dimension(const PrefractalSpec& spec);

/// Null if dim < 2 + 2s, NotNull if dim > 2 + 2s, Indeterminate on equality (up to 1e-12).
Nullity nullity_prediction(double dim, double s);

}  // namespace fbem
