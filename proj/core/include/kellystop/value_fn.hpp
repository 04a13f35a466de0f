#pragma once

#include "kellystop/market.hpp"
#include "kellystop/stencil.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace kellystop {

/// d_t J - (alpha_K^2 sigma^2 / 2) (d_pi J)^2 / d_pi^2 J. Throws
/// NumericalError when |d_pi^2 J| is indistinguishable from zero.
ResidualReport hjb_residual(const Field& value, const DerivedParams& dp, Point at, double h_pi,
                            double h_t);

/// Optimal control implied by a value function:
/// alpha = -alpha_K d_pi J / (pi d_pi^2 J).
double strategy_from_value(const Field& value, const DerivedParams& dp, Point at, double h_pi);

/// Additive normalisation: J(pi_ref) = J_ref.
struct ValueAnchor {
    double pi_ref = 1.0;
    double value_ref = 0.0;
};

/// J(pi) sampled on a log-uniform pi grid. J is fixed up to an additive
/// constant by `anchor`; the slope is normalised so that pi * d_pi J -> 1
/// as pi -> infinity, where every stop-constrained strategy approaches
/// free Kelly.
struct ValueCurve {
    std::vector<double> pi;
    std::vector<double> value;
    ValueAnchor anchor;
    /// Set when nodes near the stop were dropped because u fell below the floor.
    bool truncated = false;
    double truncated_below = 0.0;
};

struct ReconstructOptions {
    double pi_lo = 0.0;   // > stop level
    double pi_hi = 0.0;   // > pi_lo
    std::size_t nodes = 2001;
    std::optional<ValueAnchor> anchor;  // default: J = 0 at the middle node
    double u_floor = 1e-8;
    std::size_t tail_nodes = 4001;      // trapezoid nodes for z in [0, pi_c / pi_hi]
};

/// Integrate d log(pi d_pi J) / d log pi = 1 - 1/u, then d J / d log pi =
/// pi d_pi J, both with the trapezoid rule, for the scaled strategy slice
/// `u_of_z` at a fixed theta with z = stop_level / pi.
ValueCurve reconstruct_value(const std::function<double(double)>& u_of_z, double stop_level,
                             const ReconstructOptions& opts);

/// Same, for the theta-slice of a solved surface.
ValueCurve reconstruct_value(const StrategySurface& surface, double theta, double stop_level,
                             const ReconstructOptions& opts);

/// Discrete Legendre transform of samples (x_i, f_i): p_i = f'(x_i) by
/// second-order (non-uniform) differences and g_i = p_i x_i - f_i, so that
/// f + g = p x. Slopes must be strictly monotone (strict convexity or
/// concavity); DomainError otherwise.
struct TransformPair {
    std::vector<double> x;  // input nodes
    std::vector<double> p;  // slopes at the nodes
    std::vector<double> g;  // transformed values at p
};

TransformPair legendre_transform(std::span<const double> x, std::span<const double> f);

/// Second-order slope estimates on a (possibly non-uniform) strictly
/// monotone grid.
std::vector<double> slopes(std::span<const double> x, std::span<const double> f);

/// Second derivatives on a (possibly non-uniform) strictly monotone grid.
std::vector<double> curvatures(std::span<const double> x, std::span<const double> f);

/// Transformed optimal investment phi = -alpha_K p d_p^2 K on the nodes of
/// a transform pair.
std::vector<double> transformed_investment(const TransformPair& pair, const DerivedParams& dp);

/// d_t K + (1/2) sigma^2 alpha_K^2 p^2 d_p^2 K.
ResidualReport transformed_hjb_residual(const Field& transformed_value, const DerivedParams& dp,
                                        Point at, double h_p, double h_t);

struct InvestmentResidual {
    ResidualReport residual;
    /// phi + alpha_K p d_p^2 K, when K was supplied.
    std::optional<double> consistency_defect;
};

/// d_t phi + (sigma^2 alpha_K^2 / 2) d_p(p^2 d_p phi); with `transformed_value`
/// also checks phi = -alpha_K p d_p^2 K.
InvestmentResidual investment_pde_residual(const Field& phi, const DerivedParams& dp, Point at,
                                           double h_p, double h_t,
                                           const Field* transformed_value = nullptr);

}  // namespace kellystop
