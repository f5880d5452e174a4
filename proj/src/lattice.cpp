#include "becsq/lattice.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "becsq/constants.hpp"

namespace becsq {

namespace {

// The FFTW planner is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

FieldLattice FieldLattice::make(int dim, std::array<std::size_t, 3> points, std::array<double, 3> extents) {
  FieldLattice l;
  l.dim = dim;
  for (int i = 0; i < 3; ++i) {
    l.points[i] = i < dim ? points[i] : 1;
    l.extents[i] = i < dim ? extents[i] : 1.0;
  }
  l.validate();
  return l;
}

void FieldLattice::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("FieldLattice: dim must be 1, 2 or 3");
  for (int i = 0; i < dim; ++i) {
    if (!is_power_of_two(points[i])) {
      throw std::invalid_argument("FieldLattice: points per axis must be a power of two (axis " + std::to_string(i) + ")");
    }
    if (!(extents[i] > 0.0) || !std::isfinite(extents[i])) {
      throw std::invalid_argument("FieldLattice: extents must be > 0");
    }
  }
}

double FieldLattice::dV() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= spacing(i);
  return v;
}

double FieldLattice::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= extents[i];
  return v;
}

std::vector<double> FieldLattice::k_axis(int axis) const {
  const std::size_t n = points[axis];
  std::vector<double> k(n);
  const double dk = 2.0 * constants::pi / extents[axis];
  for (std::size_t i = 0; i < n; ++i) {
    const auto signed_i = static_cast<long long>(i) - (i >= (n + 1) / 2 ? static_cast<long long>(n) : 0);
    k[i] = dk * static_cast<double>(signed_i);
  }
  if (axis >= dim) k.assign(1, 0.0);
  return k;
}

std::vector<double> FieldLattice::k_squared() const {
  const auto kx = k_axis(0);
  const auto ky = k_axis(1);
  const auto kz = k_axis(2);
  std::vector<double> out(size());
  std::size_t idx = 0;
  for (double x : kx)
    for (double y : ky)
      for (double z : kz) out[idx++] = x * x + y * y + z * z;
  return out;
}

std::vector<double> FieldLattice::x_axis(int axis) const {
  const std::size_t n = points[axis];
  std::vector<double> x(n);
  const double dx = spacing(axis);
  for (std::size_t i = 0; i < n; ++i) x[i] = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * dx;
  return x;
}

struct SpectralPlan::Impl {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

SpectralPlan::SpectralPlan(const FieldLattice& lattice) : impl_(std::make_unique<Impl>()), size_(lattice.size()) {
  lattice.validate();
  int n[3];
  int rank = 0;
  for (int i = 0; i < lattice.dim; ++i) n[rank++] = static_cast<int>(lattice.points[i]);

  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* scratch = fftw_alloc_complex(size_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  impl_->forward = fftw_plan_dft(rank, n, scratch, scratch, FFTW_FORWARD, flags);
  impl_->backward = fftw_plan_dft(rank, n, scratch, scratch, FFTW_BACKWARD, flags);
  fftw_free(scratch);
  if (!impl_->forward || !impl_->backward) throw std::runtime_error("SpectralPlan: FFTW planning failed");
}

SpectralPlan::~SpectralPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->forward) fftw_destroy_plan(impl_->forward);
  if (impl_->backward) fftw_destroy_plan(impl_->backward);
}

void SpectralPlan::forward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->forward, p, p);
}

void SpectralPlan::backward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->backward, p, p);
}

}  // namespace becsq
