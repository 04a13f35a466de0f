#include "kellystop/market.hpp"

#include "kellystop/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kellystop {

DerivedParams derive_params(const MarketParams& p) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
        throw DomainError("sigma must be positive and finite, got " + std::to_string(p.sigma));
    }
    if (!std::isfinite(p.mu) || !std::isfinite(p.r)) {
        throw DomainError("mu and r must be finite");
    }
    if (p.mu == p.r) {
        throw DomainError("mu equals r: zero risk premium leaves tau and alpha_K undefined");
    }
    DerivedParams d;
    d.market = p;
    d.excess = p.mu - p.r;
    d.alpha_kelly = d.excess / (p.sigma * p.sigma);
    d.sharpe = d.excess / p.sigma;
    d.tau = 2.0 / (d.sharpe * d.sharpe);
    return d;
}

ScaledState to_scaled(double pi, double t, double stop_level, double horizon,
                      const DerivedParams& dp) {
    if (!(pi > 0.0)) throw DomainError("portfolio value must be positive");
    if (!(stop_level > 0.0)) throw DomainError("stop level must be positive");
    if (t < 0.0 || t > horizon) throw DomainError("time must lie in [0, T]");
    return {stop_level / pi, (horizon - t) / dp.tau};
}

PortfolioState from_scaled(const ScaledState& st, double stop_level, double horizon,
                           const DerivedParams& dp) {
    if (!(st.z > 0.0)) throw DomainError("z = 0 corresponds to infinite portfolio value");
    if (st.theta < 0.0) throw DomainError("theta must be non-negative");
    return {stop_level / st.z, horizon - st.theta * dp.tau};
}

double to_years(double amount, TimeUnit unit) {
    switch (unit) {
        case TimeUnit::years: return amount;
        case TimeUnit::months: return amount / 12.0;
        case TimeUnit::weeks: return amount * 7.0 / 365.0;
        case TimeUnit::days: return amount / 365.0;
    }
    return amount;
}

// ---------------------------------------------------------------------------

Grid::Grid(std::size_t nz, double dtheta, std::size_t ntheta)
    : nz_(nz), dz_(1.0 / static_cast<double>(nz + 1)), dtheta_(dtheta), ntheta_(ntheta) {
    if (nz < 1) throw DomainError("grid needs at least one interior z node");
    if (ntheta < 1) throw DomainError("grid needs at least one theta step");
    if (!(dtheta > 0.0) || !std::isfinite(dtheta)) throw DomainError("dtheta must be positive");
    if (stability_ratio() > kMaxStabilityRatio) {
        throw DomainError("unstable grid: dtheta/dz^2 = " + std::to_string(stability_ratio()) +
                          " exceeds 0.5");
    }
}

Grid Grid::for_horizon(std::size_t nz, double theta_max, double ratio) {
    if (!(theta_max > 0.0) || !std::isfinite(theta_max)) {
        throw DomainError("theta_max must be positive");
    }
    if (!(ratio > 0.0) || ratio > kMaxStabilityRatio) {
        throw DomainError("stability ratio must lie in (0, 0.5]");
    }
    const double dz = 1.0 / static_cast<double>(nz + 1);
    const double limit = ratio * dz * dz;
    auto steps = static_cast<std::size_t>(std::ceil(theta_max / limit));
    steps = std::max<std::size_t>(steps, 1);
    // ceil() can land one short when theta_max / limit is an integer up to roundoff.
    while (theta_max / static_cast<double>(steps) > limit) ++steps;
    return Grid(nz, theta_max / static_cast<double>(steps), steps);
}

// ---------------------------------------------------------------------------

std::size_t StrategySurface::planes_for(const Grid& grid, std::size_t stride) noexcept {
    const std::size_t full = grid.ntheta() / stride;
    return full + 1 + (grid.ntheta() % stride != 0 ? 1 : 0);
}

StrategySurface::StrategySurface(Grid grid, std::size_t stride, std::vector<double> values,
                                 ProblemKind kind)
    : grid_(grid), stride_(stride), plane_count_(0), values_(std::move(values)), kind_(kind) {
    if (stride_ < 1) throw DomainError("plane stride must be at least 1");
    plane_count_ = planes_for(grid_, stride_);
    const std::size_t n = grid_.node_count();
    if (values_.size() != plane_count_ * n) {
        throw DomainError("surface value count does not match grid and stride");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw NumericalError("surface contains non-finite values");
    }
    if (kind_ == ProblemKind::stop_loss) {
        for (std::size_t j = 0; j < plane_count_; ++j) {
            const auto row = plane(j);
            if (row.front() != 1.0 || row.back() != 0.0) {
                throw DomainError("stop-loss surface violates u(0)=1, u(1)=0");
            }
            for (double v : row) {
                if (v < 0.0 || v > 1.0) throw DomainError("stop-loss surface leaves [0, 1]");
            }
        }
    }
}

double StrategySurface::plane_theta(std::size_t j) const noexcept {
    if (j + 1 == plane_count_) return grid_.theta_max();
    return static_cast<double>(j * stride_) * grid_.dtheta();
}

std::span<const double> StrategySurface::plane(std::size_t j) const noexcept {
    const std::size_t n = grid_.node_count();
    return std::span<const double>(values_).subspan(j * n, n);
}

double StrategySurface::at(double z, double theta) const {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("z outside [0, 1]");
    if (!(theta >= 0.0 && theta <= grid_.theta_max() * (1.0 + 1e-12))) {
        throw DomainError("theta outside [0, theta_max]");
    }
    return interpolate(z, std::min(theta, grid_.theta_max()));
}

double StrategySurface::at_clamped(double z, double theta) const noexcept {
    return interpolate(std::clamp(z, 0.0, 1.0), std::clamp(theta, 0.0, grid_.theta_max()));
}

double StrategySurface::interpolate(double z, double theta) const noexcept {
    const std::size_t n = grid_.node_count();
    const double fz = z / grid_.dz();
    std::size_t i = std::min(static_cast<std::size_t>(fz), n - 2);
    const double wz = std::clamp(fz - static_cast<double>(i), 0.0, 1.0);

    std::size_t j = 0;
    double wt = 0.0;
    if (plane_count_ > 1) {
        const double spacing = static_cast<double>(stride_) * grid_.dtheta();
        j = std::min(static_cast<std::size_t>(theta / spacing), plane_count_ - 2);
        const double t0 = plane_theta(j);
        const double t1 = plane_theta(j + 1);
        wt = std::clamp((theta - t0) / (t1 - t0), 0.0, 1.0);
    }
    const double* a = values_.data() + j * n;
    const double lo = a[i] + wz * (a[i + 1] - a[i]);
    if (wt == 0.0) return lo;
    const double* b = a + n;
    const double hi = b[i] + wz * (b[i + 1] - b[i]);
    return lo + wt * (hi - lo);
}

}  // namespace kellystop
