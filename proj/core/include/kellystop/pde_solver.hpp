#pragma once

#include "kellystop/market.hpp"
#include "kellystop/stencil.hpp"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace kellystop {

/// Scaled strategy equation d_theta u = u^2 z^2 d_zz u on [0,1] x [0, theta_max]
/// with u(0, theta) = 1, u(1, theta) = 0 and u(z, 0) = 1. At the corner
/// (z = 1, theta = 0) the stop value 0 wins.
struct StopLossProblem {
    Grid grid;
    std::size_t stride = 1;

    double theta_max() const noexcept { return grid.theta_max(); }

    /// Stability-limited grid reaching theta_max exactly, keeping at most
    /// `max_planes` stored planes.
    static StopLossProblem make(std::size_t nz, double theta_max, std::size_t max_planes = 2001,
                                double ratio = Grid::kMaxStabilityRatio);
};

/// March the explicit Euler scheme from theta = 0. Throws NumericalError if
/// the iterate leaves [0, 1] or becomes non-finite.
StrategySurface solve_stop_loss(const StopLossProblem& problem);

/// One explicit Euler step on a full row (boundaries included). Interior:
/// u_i += dtheta * u_i^2 z_i^2 (u_{i+1} - 2 u_i + u_{i-1}) / dz^2 with
/// z_i = i * dz; the first and last entries are copied unchanged.
std::vector<double> step_explicit_euler(std::span<const double> row, double dtheta, double dz);

/// d_t alpha + (sigma^2 / 2) alpha^2 d_pi(pi^2 d_pi alpha), by central differences.
ResidualReport pde_residual_alpha(const Field& alpha, double sigma, Point at, double h_pi,
                                  double h_t);

/// d_t gamma + (sigma^2 / 2) gamma^2 d_pi^2 gamma for the amount invested gamma = pi * alpha.
ResidualReport pde_residual_gamma(const Field& gamma, double sigma, Point at, double h_pi,
                                  double h_t);

/// Drift coefficient of d(gamma) - (d_pi gamma) d(pi) reconstructed from a
/// surface: d_t gamma + (sigma^2 / 2) gamma^2 d_pi^2 gamma, with
/// gamma = alpha_K * pi * u(pi_c / pi, (T - t) / tau). Evaluated on grid
/// data at the interior node and stored plane nearest to the point.
struct BalanceReport {
    ResidualReport defect;   // at = snapped (pi, t); h_x = dz, h_t = plane spacing
    double scaled_defect;    // u^2 z^2 u_zz - u_theta at the node
    double scheme_scale;     // dz^2 + dtheta of the solver
    double constant;         // |scaled_defect| / scheme_scale
};

BalanceReport self_financing_balance(const StrategySurface& surface, const DerivedParams& dp,
                                     double stop_level, double horizon, Point at);

namespace slice {
struct FixedZ {
    double z = 0.0;
};
struct FixedTheta {
    double theta = 0.0;
};
/// Stop level a fraction delta below the portfolio value: z = 1 - delta.
struct FixedDelta {
    double delta = 0.0;
};
}  // namespace slice

using SliceSpec = std::variant<slice::FixedZ, slice::FixedTheta, slice::FixedDelta>;

/// Sampled curve: `coord` holds theta (fixed-z modes, one entry per stored
/// plane) or z (fixed-theta mode, one entry per node).
struct Curve {
    std::vector<double> coord;
    std::vector<double> u;
};

/// Bilinearly interpolated slice; DomainError for coordinates off the grid.
Curve extract_slice(const StrategySurface& surface, const SliceSpec& spec);

/// Surface holding u = 1 - z on every plane (the long-horizon limit).
StrategySurface linear_profile_surface(const Grid& grid, std::size_t stride);

}  // namespace kellystop
