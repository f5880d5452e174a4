#pragma once

// Figure-reproduction jobs and the generic experiment runners behind the
// CLI subcommands. Every job returns a Report; nothing here touches files.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "becsq/bogoliubov.hpp"
#include "becsq/experiments.hpp"
#include "becsq/report.hpp"
#include "becsq/twa.hpp"
#include "becsq/two_mode.hpp"

namespace becsq::figures {

struct Ensemble {
  std::size_t trajectories = 0;  ///< 0 = the job's default
  std::uint64_t seed = 1;
  std::size_t workers = 0;
};

// Generic runners.

struct TwoModeJob {
  two_mode::TwoModeParams params;
  std::vector<double> theta_grid;
  std::vector<double> phi_grid;
};
Report run_two_mode(const TwoModeJob& job);

struct TwaJob {
  enum class Setup { line, box };
  Setup setup = Setup::box;
  experiments::Line1D line;
  experiments::Box box;
  twa::PulseSequence sequence;
  twa::RunOptions options;
  double dt = 0.0;  ///< 0 = automatic
  two_mode::Metric metric = two_mode::Metric::Na;
};
Report run_twa(const TwaJob& job);

struct BogoliubovJob {
  bogoliubov::BogoliubovParams params;
  std::vector<double> tau_grid;
};
Report run_bogoliubov(const BogoliubovJob& job);

struct ScalingJob {
  bogoliubov::BogoliubovParams base;  ///< extents[0] is the base side length
  std::vector<double> sizes;
  bool with_sum = true;
};
Report run_scaling(const ScalingJob& job);

// Figure jobs with the published parameters.

Report figure2(std::size_t theta_points = 1001);
Report figure3(std::size_t theta_points = 1001);
/// Default R = 500.
Report figure4(const Ensemble& ensemble);
/// Default R = 200.
Report figure5(const Ensemble& ensemble);
/// Default R = 500, Gaussian mode.
Report figure6(const Ensemble& ensemble, experiments::ModeShape shape = experiments::ModeShape::gaussian);
/// Bogoliubov size sweep in `dim` dimensions with the published U, N and
/// hold-time rule, sizes from 50 um to 3200 um.
Report scaling_figure(int dim);
/// 32^3 periodic box in the low-depletion regime. Default R = 100.
Report box3d_surrogate(const Ensemble& ensemble);

/// Names accepted by `figure <n>`: 2, 3, 4, 5, 6, scaling1d, scaling2d,
/// scaling3d, box3d.
std::vector<std::string> figure_names();
Report figure(const std::string& name, const Ensemble& ensemble);

}  // namespace becsq::figures
