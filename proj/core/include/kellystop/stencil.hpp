#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kellystop {

/// A function of (state, time) such as alpha(pi, t), gamma(pi, t), J(pi, t)
/// or K(p, t).
using Field = std::function<double(double, double)>;

/// Evaluation location: x is the state variable (pi or p), t is time.
struct Point {
    double x = 0.0;
    double t = 0.0;
};

/// Result of a central-difference residual evaluation.
struct ResidualReport {
    Point at;
    double residual = 0.0;
    double h_x = 0.0;
    double h_t = 0.0;
    /// Estimated rounding floor of the stencil: residuals of this size carry
    /// no truncation information.
    double roundoff = 0.0;
};

/// Default state step: 1e-4 of the local scale max(|x|, 1).
double default_step(double x) noexcept;

/// Second-order central differences of a Field at a point.
struct Derivatives {
    double f = 0.0;
    double dx = 0.0;
    double dxx = 0.0;
    double dt = 0.0;
    /// Rounding error bounds of dx, dxx, dt.
    double err_dx = 0.0;
    double err_dxx = 0.0;
    double err_dt = 0.0;
};

Derivatives central_differences(const Field& f, Point p, double h_x, double h_t);

/// Convergence order from two errors at steps h1 > h2: log(e1/e2) / log(h1/h2).
double observed_order(double h1, double e1, double h2, double e2);

/// Richardson order estimate from three solutions with steps h1 > h2 > h3,
/// d12 = |u1 - u2| and d23 = |u2 - u3|. Solves
/// (h1^p - h2^p) / (h2^p - h3^p) = d12 / d23 for p; handles non-uniform
/// refinement ratios. Returns NaN when no root exists in (0, 10).
double richardson_order(double h1, double h2, double h3, double d12, double d23);

/// One row of a residual-refinement study.
struct RefinementRow {
    double h = 0.0;
    double residual = 0.0;
    double roundoff = 0.0;
};

/// Residual behaviour under stencil refinement.
struct RefinementStudy {
    std::vector<RefinementRow> rows;
    /// Orders of consecutive pairs whose finer residual exceeds
    /// `kTruncationMargin` times its rounding floor.
    std::vector<double> orders;
    /// Minimum of `orders`; NaN when no pair is truncation-dominated.
    double min_order = 0.0;
    /// True when every residual sits within the rounding floor margin, i.e.
    /// the stencil is exact for this function.
    bool exact = false;

    static constexpr double kTruncationMargin = 10.0;

    /// Converges at `order` or better, or is stencil-exact.
    bool converges_at(double order) const noexcept;
};

/// Evaluate `residual_at(h)` along a halving ladder from h_max down to h_min
/// (inclusive of the first step below or equal to h_min).
RefinementStudy refine(const std::function<ResidualReport(double)>& residual_at, double h_max,
                       double h_min);

}  // namespace kellystop
