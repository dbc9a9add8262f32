#pragma once

#include <span>
#include <string>

#include "fbem/assembly.hpp"

namespace fbem {

/// sqrt(|c^H A c|).
double energy_norm(const ComplexMatrix& matrix, const ComplexVector& coeff);
double energy_norm(const GalerkinSystem& system, const ComplexVector& coeff);

/// Parameters of the Fourier-integral H^s norm.
struct HsNormSpec {
  double s = 0.0;
  double radius = 200.0;      // truncation radius in frequency space
  int radial_nodes = 256;     // Gauss-Legendre nodes on [0, radius]
  int angular_nodes = 64;     // minimum per radial shell
  double tail_warning = 0.01; // relative tail above which a warning is raised

  void validate() const;
};

struct HsNormResult {
  double value = 0.0;      // sqrt(truncated + tail)
  double truncated = 0.0;  // integral over |xi| <= radius (squared norm)
  double tail = 0.0;       // fitted tail beyond the radius (squared norm); may be +inf
  bool warning = false;    // tail above the warning threshold relative to the value
  std::string message;
};

/// Unitary Fourier transform (2 pi)^{-1} int e^{-i xi.x} u(x) dx of a P0 or P1 density.
Complex density_transform(const FunctionSpace& space, std::span<const Complex> coeff, Point2 xi);

/// H^s(R^2) norm of the zero extension of a P0 or P1 density via the Fourier integral.
HsNormResult hs_norm(const FunctionSpace& space, std::span<const Complex> coeff, const HsNormSpec& spec);

/// Capacity surrogate <1, phi_h> of the k = i, f = 1 Dirichlet problem; 0 for an empty screen.
double capacity_estimate(const PanelSet& screen, int refine, const QuadratureOptions& options = {},
                         Execution execution = Execution::Parallel);

}  // namespace fbem
