// Grid-based density calculus: bell-shape checks, convolution closure,
// weighted-sum tails, and the symmetric-sum identity, all with explicit
// tolerances and tracked truncation mass.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rwrs/estimate.hpp"
#include "rwrs/scenery.hpp"

namespace rwrs {

/// Density sampled at the M+1 nodes of a uniform grid on [-W, W]. The node
/// count keeps 0 on the grid for even M, which the evenness check relies on.
struct GridDensity {
  double half_width = 0.0;      // W
  int bins = 0;                 // M (even); spacing h = 2W / M
  std::vector<double> values;   // M + 1 samples at -W + j h

  double spacing() const { return 2.0 * half_width / bins; }
  double node(int j) const { return -half_width + j * spacing(); }

  double mass() const;                 // trapezoid integral over [-W, W]
  double value_at(double t) const;     // linear interpolation, 0 outside
  double tail_above(double y) const;   // trapezoid integral over [y, W]
};

/// Samples fn on the grid.
GridDensity render_grid(const std::function<double(double)>& fn, double half_width,
                        int bins);

/// Renders the exponential-power density; half_width <= 0 picks the width
/// where the true tail mass drops below 1e-9.
GridDensity render_density(const SceneryDistribution& dist, double half_width,
                           int bins);

/// Width at which the scenery tail falls below the given mass.
double tail_cutoff(const SceneryDistribution& dist, double tail_mass);

struct BellShapeReport {
  bool ok = true;
  bool even = true;
  bool monotone = true;
  int violation_index = -1;   // node index of the first violation
  double violation = 0.0;     // magnitude of the worst offence found first
};

/// True iff even within tol and nonincreasing on [0, W] within tol per
/// adjacent pair.
BellShapeReport is_bell_shaped(const GridDensity& gd, double tol);

/// Discrete convolution scaled by the spacing, on the widened support
/// W_f + W_g. Spacings must match. mass(conv) tracks mass(f) * mass(g).
GridDensity convolve(const GridDensity& f, const GridDensity& g);

/// P(sum_j coeff_j eta_j > y) by Monte Carlo; common random numbers across
/// coefficient vectors of equal length come from reusing the seed.
TailEstimate weighted_tail_mc(const std::vector<double>& coeffs,
                              const SceneryDistribution& dist, double y,
                              std::int64_t replicas, std::uint64_t seed);

/// Same tail through iterated grid convolution of the scaled densities.
/// Rejects more than 32 coefficients (support blow-up).
double weighted_tail_grid(const std::vector<double>& coeffs,
                          const SceneryDistribution& dist, double y,
                          int bins_per_component = 2048);

enum class TailMethod { kMonteCarlo, kGrid };

/// Dispatcher over the two routes above.
double weighted_tail(const std::vector<double>& coeffs,
                     const SceneryDistribution& dist, double y, TailMethod method,
                     std::int64_t replicas, std::uint64_t seed);

/// Residual of P(xi+eta > y) = P(xi > y)
///   + int_0^inf P(eta > z) (f_xi(|y-z|) - f_xi(y+z)) dz
/// for symmetric independent xi ~ f, eta ~ g, all three pieces evaluated by
/// quadrature on the grids.
double symmetric_sum_identity_check(const GridDensity& f, const GridDensity& g,
                                    double y);

}  // namespace rwrs
