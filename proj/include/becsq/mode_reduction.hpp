#pragma once

// Effective single-mode nonlinearities for standard mode shapes, and
// dimensionally reduced contact couplings.

#include <array>
#include <optional>
#include <span>

#include "becsq/constants.hpp"

namespace becsq::mode_reduction {

struct InteractionSpec {
  double a_aa = 0.0;  ///< m
  double a_ab = 0.0;
  double a_bb = 0.0;
  double mass = constants::rb87_mass;  ///< kg

  /// Rejects negative scattering lengths and non-positive mass.
  void validate() const;
};

/// Contact couplings U_ij in J m^3.
struct Couplings {
  double U_aa = 0.0;
  double U_ab = 0.0;
  double U_bb = 0.0;
};

enum class TrapKind { harmonic, box };

struct TrapSpec {
  TrapKind kind = TrapKind::harmonic;
  std::array<double, 3> omegas{};   ///< rad/s, harmonic only
  std::array<double, 3> extents{};  ///< m, box only
  /// Filter half-width in units of the per-axis oscillator length sqrt(hbar/(m w)).
  std::optional<double> filter_p;

  void validate() const;
};

Couplings u_from_scattering(const InteractionSpec& spec);

/// chi = (U/hbar) sum rho^2 dV for a sampled density rho = |u0|^2.
/// Throws NormalizationError when sum rho dV differs from 1 by more than 1e-8.
double chi_overlap(std::span<const double> density, double dV, double U);

/// Constant density over the box volume: chi = U/(hbar V).
double chi_uniform(const TrapSpec& box, double U);

double chi_gaussian(const TrapSpec& trap, double U, double mass);

double chi_thomas_fermi(const TrapSpec& trap, double U, double mass, double N);

/// Ground-state Gaussian truncated to |x_i| < p a_i and renormalized.
double chi_filtered_gaussian(const TrapSpec& trap, double U, double mass);

enum class TransverseKind { uniform, gaussian };

/// Profile over the integrated-out axes. For `uniform` the widths are box
/// lengths, for `gaussian` they are standard deviations of the density.
/// Only the first (3 - target_dim) widths are used.
struct TransverseProfile {
  TransverseKind kind = TransverseKind::uniform;
  std::array<double, 2> widths{};
};

/// U_reduced = U_3d * integral of rho_perp^2 over the transverse axes.
/// Units J m (target_dim 1) or J m^2 (target_dim 2).
double reduced_interaction(double U_3d, int target_dim, const TransverseProfile& profile);

}  // namespace becsq::mode_reduction
