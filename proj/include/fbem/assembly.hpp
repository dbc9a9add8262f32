#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "fbem/kernel.hpp"
#include "fbem/mesh.hpp"
#include "fbem/pair_integrals.hpp"

namespace fbem {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class Execution { Serial, Parallel };

/// Boundary data given in closed form on the plane x3 = 0.
struct BoundaryData {
  enum class Kind { Constant, PlaneWave, Polynomial };

  struct Monomial {
    Complex coeff;
    int px = 0;  // power of x
    int py = 0;  // power of y
  };

  Kind kind = Kind::Constant;
  Complex value = 0.0;               // Constant
  Point2 direction;                  // PlaneWave: trace of exp(i k d.x), |d| <= 1
  std::vector<Monomial> monomials;   // Polynomial

  static BoundaryData constant(Complex c);
  static BoundaryData plane_wave(Point2 d);
  static BoundaryData polynomial(std::vector<Monomial> terms);

  Complex operator()(Point2 x, Complex k) const;
  bool is_zero() const;
};

/// Galerkin matrix of the single-layer form on a P0 space.
ComplexMatrix assemble_single_layer(const FunctionSpace& space, const Wavenumber& k,
                                    const QuadratureOptions& options = {},
                                    Execution execution = Execution::Parallel);

/// Galerkin matrix of the hypersingular form on a P1 zero-trace space, in the
/// integration-by-parts form  int int Phi (grad psi_q . grad psi_p - k^2 psi_q psi_p).
ComplexMatrix assemble_hypersingular(const FunctionSpace& space, const Wavenumber& k,
                                     const QuadratureOptions& options = {},
                                     Execution execution = Execution::Parallel);

/// c^H A c for the single-layer matrix without storing A (rows in parallel, summed in order).
Complex single_layer_energy(const FunctionSpace& space, const Wavenumber& k, const ComplexVector& coeff,
                            const QuadratureOptions& options = {},
                            Execution execution = Execution::Parallel);

/// Load vector: b[p] = int f psi_p on P0 (Dirichlet), b[p] = -int g psi_p on P1 (Neumann).
ComplexVector assemble_rhs(const FunctionSpace& space, const BoundaryData& data, const Wavenumber& k);

/// The matrix of the form matching the space kind.
ComplexMatrix assemble_matrix(const FunctionSpace& space, const Wavenumber& k,
                              const QuadratureOptions& options = {},
                              Execution execution = Execution::Parallel);

/// Continuity and coercivity estimates of A relative to the SPD reference Gram matrix G:
/// C_h = max |v^H A w| / (|v|_G |w|_G),  c_h = min |v^H A v| / |v|_G^2.
struct FormConstants {
  double continuity = 1.0;
  double coercivity = 1.0;
};

FormConstants estimate_constants(const ComplexMatrix& matrix, const ComplexMatrix& reference);

struct GalerkinSystem {
  ComplexMatrix matrix;
  ComplexVector rhs;
  std::shared_ptr<const FunctionSpace> space;
  Wavenumber k{Complex(0.0, 1.0)};
  QuadratureOptions quadrature;
  double continuity_est = 1.0;  // C_h
  double coercivity_est = 1.0;  // c_h
  /// Reference Gram matrix (the same form at k = i), defining the discrete norm.
  ComplexMatrix reference;

  std::size_t size() const { return static_cast<std::size_t>(rhs.size()); }
};

/// Assembles matrix, load vector, reference Gram matrix and constants.
GalerkinSystem assemble_system(std::shared_ptr<const FunctionSpace> space, const Wavenumber& k,
                               const BoundaryData& data, const QuadratureOptions& options = {},
                               Execution execution = Execution::Parallel);

}  // namespace fbem
