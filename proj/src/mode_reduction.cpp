#include "becsq/mode_reduction.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "becsq/error.hpp"

namespace becsq::mode_reduction {

using constants::hbar;
using constants::pi;

namespace {

void require_harmonic(const TrapSpec& trap, const char* who) {
  trap.validate();
  if (trap.kind != TrapKind::harmonic) throw std::invalid_argument(std::string(who) + ": harmonic trap required");
}

double omega_product(const TrapSpec& trap) { return trap.omegas[0] * trap.omegas[1] * trap.omegas[2]; }

}  // namespace

void InteractionSpec::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("InteractionSpec: mass must be > 0");
  if (!(a_aa >= 0.0) || !(a_ab >= 0.0) || !(a_bb >= 0.0)) {
    throw std::invalid_argument("InteractionSpec: negative scattering lengths are not supported");
  }
}

void TrapSpec::validate() const {
  const auto& values = kind == TrapKind::harmonic ? omegas : extents;
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("TrapSpec: frequencies/extents must be > 0");
  }
  if (filter_p) {
    if (kind != TrapKind::harmonic) throw std::invalid_argument("TrapSpec: filter_p requires a harmonic trap");
    if (!(*filter_p > 0.0)) throw std::invalid_argument("TrapSpec: filter_p must be > 0");
  }
}

Couplings u_from_scattering(const InteractionSpec& spec) {
  spec.validate();
  const double scale = 4.0 * pi * hbar * hbar / spec.mass;
  return {scale * spec.a_aa, scale * spec.a_ab, scale * spec.a_bb};
}

double chi_overlap(std::span<const double> density, double dV, double U) {
  double norm = 0.0;
  double overlap = 0.0;
  for (double rho : density) {
    norm += rho;
    overlap += rho * rho;
  }
  norm *= dV;
  if (std::abs(norm - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "chi_overlap: profile integrates to " << norm << ", expected 1 within 1e-8";
    throw NormalizationError(msg.str());
  }
  return U / hbar * overlap * dV;
}

double chi_uniform(const TrapSpec& box, double U) {
  box.validate();
  if (box.kind != TrapKind::box) throw std::invalid_argument("chi_uniform: box trap required");
  return U / (hbar * box.extents[0] * box.extents[1] * box.extents[2]);
}

double chi_gaussian(const TrapSpec& trap, double U, double mass) {
  require_harmonic(trap, "chi_gaussian");
  return U / hbar * std::sqrt(mass * mass * mass * omega_product(trap) / (8.0 * pi * pi * pi * hbar * hbar * hbar));
}

double chi_thomas_fermi(const TrapSpec& trap, double U, double mass, double N) {
  require_harmonic(trap, "chi_thomas_fermi");
  if (!(N > 0.0)) throw std::invalid_argument("chi_thomas_fermi: N must be > 0");
  const double inner = 15.0 * U * omega_product(trap) / (16.0 * pi * std::sqrt(2.0));
  return 4.0 / 7.0 * std::pow(inner, 0.4) * std::pow(mass / N, 0.6) / hbar;
}

double chi_filtered_gaussian(const TrapSpec& trap, double U, double mass) {
  require_harmonic(trap, "chi_filtered_gaussian");
  if (!trap.filter_p) throw std::invalid_argument("chi_filtered_gaussian: filter_p required");
  const double p = *trap.filter_p;
  const double e1 = std::erf(p);
  const double ratio = std::pow(std::erf(std::sqrt(2.0) * p), 3) / std::pow(e1, 6);
  return ratio * chi_gaussian(trap, U, mass);
}

double reduced_interaction(double U_3d, int target_dim, const TransverseProfile& profile) {
  if (target_dim != 1 && target_dim != 2) throw std::invalid_argument("reduced_interaction: target_dim must be 1 or 2");
  const int axes = 3 - target_dim;
  double factor = 1.0;
  for (int i = 0; i < axes; ++i) {
    const double w = profile.widths[i];
    if (!(w > 0.0)) throw std::invalid_argument("reduced_interaction: widths must be > 0");
    factor *= profile.kind == TransverseKind::uniform ? 1.0 / w : 1.0 / (2.0 * std::sqrt(pi) * w);
  }
  return U_3d * factor;
}

}  // namespace becsq::mode_reduction
