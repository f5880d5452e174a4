#pragma once

// Builders for the standard field-simulation setups: 1D condensates with a
// chosen mode shape and matched nonlinearity, and uniform periodic boxes.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "becsq/lattice.hpp"
#include "becsq/twa.hpp"
#include "becsq/two_mode.hpp"

namespace becsq::experiments {

enum class ModeShape { uniform, thomas_fermi, gaussian };

std::string to_string(ModeShape shape);
ModeShape parse_mode_shape(std::string_view name);

/// 1D condensate whose reduced couplings reproduce the two-mode chi values
/// for its own mode shape. All atoms start in |a>.
struct Line1D {
  ModeShape shape = ModeShape::uniform;
  double n_total = 2e5;
  double chi_aa = 0.0;  ///< rad/s
  double chi_ab = 0.0;
  double chi_bb = 0.0;
  double box = 200e-6;  ///< m, periodic domain; the uniform mode fills it
  std::size_t points = 256;
  /// Thomas-Fermi radius or Gaussian density standard deviation, m.
  double width = 50e-6;
  double mass = constants::rb87_mass;
};

/// Uniform condensate filling a periodic box in 1, 2 or 3 dimensions.
struct Box {
  int dim = 1;
  std::array<std::size_t, 3> points{256, 1, 1};
  std::array<double, 3> extents{600e-6, 1.0, 1.0};
  double n_total = 4e5;
  double chi_aa = 0.0;
  double chi_ab = 0.0;
  double chi_bb = 0.0;
  double mass = constants::rb87_mass;
};

struct Prepared {
  FieldLattice lattice;
  twa::InitialState initial;
  twa::HoldParams hold;
  double overlap = 0.0;     ///< sum rho^2 dV of the sampled mode, m^-dim
  double trap_omega = 0.0;  ///< rad/s, 0 without a trap
};

/// The sampled profile is normalized on the grid, and U_ij = hbar chi_ij /
/// overlap. Harmonic shapes get the trap V = m w^2 x^2 / 2 that holds them:
/// w = hbar/(2 m s^2) for a Gaussian of density width s, and for
/// Thomas-Fermi the w whose ground state with n_total atoms has radius R.
Prepared prepare(const Line1D& setup);
Prepared prepare(const Box& setup);

/// Beamsplit(pi/4), hold (split by a pi pulse when requested), then a
/// recombination scan over theta at the given phi values.
twa::PulseSequence squeeze_sequence(double tau_hold, bool pi_pulse, std::vector<double> theta_grid,
                                    std::vector<double> phi_grid);

/// Evenly spaced [0, pi) grid.
std::vector<double> theta_grid(std::size_t count);

/// Index of the most squeezed scan point for `metric`; ties (1e-12 relative)
/// go to the smallest theta, then phi. Non-finite points are skipped.
std::size_t best_point(const std::vector<twa::ScanPoint>& scan, two_mode::Metric metric);

double db_of(const twa::NumberEstimate& e, two_mode::Metric metric);
double se_db_of(const twa::NumberEstimate& e, two_mode::Metric metric);

}  // namespace becsq::experiments
