#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace becsq {

using cplx = std::complex<double>;

/// Periodic grid in 1, 2 or 3 dimensions. Unused axes have one point and
/// unit extent. Storage is row-major with the last used axis fastest.
struct FieldLattice {
  int dim = 1;
  std::array<std::size_t, 3> points{1, 1, 1};
  std::array<double, 3> extents{1.0, 1.0, 1.0};  ///< m

  /// Validates dim, power-of-two counts and positive extents.
  static FieldLattice make(int dim, std::array<std::size_t, 3> points, std::array<double, 3> extents);

  std::size_t size() const { return points[0] * points[1] * points[2]; }
  double dV() const;
  double volume() const;
  double spacing(int axis) const { return extents[axis] / static_cast<double>(points[axis]); }

  /// Angular wavenumbers 2 pi n / L in FFT order.
  std::vector<double> k_axis(int axis) const;
  /// |k|^2 per flattened index.
  std::vector<double> k_squared() const;
  /// Cell-centred coordinates, symmetric about zero.
  std::vector<double> x_axis(int axis) const;

  void validate() const;
};

/// Unnormalized in-place FFTs over a lattice. Plans are created once per
/// object and shared read-only, so `forward`/`backward` are thread-safe for
/// distinct buffers.
class SpectralPlan {
 public:
  explicit SpectralPlan(const FieldLattice& lattice);
  ~SpectralPlan();
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  void forward(cplx* data) const;
  void backward(cplx* data) const;
  std::size_t size() const { return size_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t size_ = 0;
};

}  // namespace becsq
