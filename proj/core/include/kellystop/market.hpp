#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kellystop {

/// Single risky asset (geometric Brownian motion) plus a risk-free asset.
/// Rates are per year, volatility per square-root year.
struct MarketParams {
    double mu = 0.0;     // drift of the risky asset
    double r = 0.0;      // risk-free rate
    double sigma = 0.0;  // volatility of the risky asset
};

/// Quantities every other component works with. Built only through
/// derive_params(), which enforces sigma > 0 and mu != r.
struct DerivedParams {
    MarketParams market;
    double excess = 0.0;       // mu - r
    double alpha_kelly = 0.0;  // free Kelly fraction (mu - r) / sigma^2
    double sharpe = 0.0;       // (mu - r) / sigma
    double tau = 0.0;          // characteristic time 2 / sharpe^2, in years
};

DerivedParams derive_params(const MarketParams& p);

/// Scaled reciprocal wealth z = pi_c / pi and scaled time-to-period-end
/// theta = (T - t) / tau.
struct ScaledState {
    double z = 0.0;
    double theta = 0.0;
};

struct PortfolioState {
    double pi = 0.0;
    double t = 0.0;
};

ScaledState to_scaled(double pi, double t, double stop_level, double horizon,
                      const DerivedParams& dp);
PortfolioState from_scaled(const ScaledState& st, double stop_level, double horizon,
                           const DerivedParams& dp);

enum class TimeUnit { years, months, weeks, days };

/// 1 month = 1/12 year, 1 week = 7/365 year, 1 day = 1/365 year.
double to_years(double amount, TimeUnit unit);

/// Uniform grid on z in [0, 1] with nz interior nodes (node 0 is z = 0,
/// node nz + 1 is z = 1) and ntheta explicit steps of size dtheta.
class Grid {
public:
    static constexpr double kMaxStabilityRatio = 0.5;

    /// Throws DomainError when dtheta / dz^2 exceeds kMaxStabilityRatio.
    Grid(std::size_t nz, double dtheta, std::size_t ntheta);

    /// Smallest step count that reaches theta_max exactly with
    /// dtheta / dz^2 <= ratio.
    static Grid for_horizon(std::size_t nz, double theta_max,
                            double ratio = kMaxStabilityRatio);

    std::size_t nz() const noexcept { return nz_; }
    std::size_t node_count() const noexcept { return nz_ + 2; }
    double dz() const noexcept { return dz_; }
    double dtheta() const noexcept { return dtheta_; }
    std::size_t ntheta() const noexcept { return ntheta_; }
    double theta_max() const noexcept { return dtheta_ * static_cast<double>(ntheta_); }
    double stability_ratio() const noexcept { return dtheta_ / (dz_ * dz_); }
    double z(std::size_t i) const noexcept { return static_cast<double>(i) * dz_; }

private:
    std::size_t nz_;
    double dz_;
    double dtheta_;
    std::size_t ntheta_;
};

enum class ProblemKind { stop_loss, target, generic };

/// Scaled strategy u(z, theta) on a Grid. Planes are stored every
/// `stride` explicit steps; the final plane (theta_max) is always kept.
class StrategySurface {
public:
    /// `values` is row-major by plane: plane j occupies
    /// [j * node_count, (j + 1) * node_count). Validates finiteness and,
    /// for ProblemKind::stop_loss, the box [0, 1] and the z-boundaries.
    StrategySurface(Grid grid, std::size_t stride, std::vector<double> values,
                    ProblemKind kind);

    const Grid& grid() const noexcept { return grid_; }
    ProblemKind kind() const noexcept { return kind_; }
    std::size_t stride() const noexcept { return stride_; }
    std::size_t plane_count() const noexcept { return plane_count_; }
    double plane_theta(std::size_t j) const noexcept;
    std::span<const double> plane(std::size_t j) const noexcept;
    double value(std::size_t plane_index, std::size_t node) const noexcept {
        return values_[plane_index * grid_.node_count() + node];
    }
    std::span<const double> values() const noexcept { return values_; }

    /// Bilinear interpolation; throws DomainError outside [0,1] x [0, theta_max].
    double at(double z, double theta) const;
    /// Bilinear interpolation with z and theta clamped into the grid.
    double at_clamped(double z, double theta) const noexcept;

    /// Number of stored planes for a grid/stride combination.
    static std::size_t planes_for(const Grid& grid, std::size_t stride) noexcept;

private:
    double interpolate(double z, double theta) const noexcept;

    Grid grid_;
    std::size_t stride_;
    std::size_t plane_count_;
    std::vector<double> values_;
    ProblemKind kind_;
};

}  // namespace kellystop
