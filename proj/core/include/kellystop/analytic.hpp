#pragma once

#include "kellystop/market.hpp"

#include <functional>
#include <limits>
#include <variant>

namespace kellystop {

/// Closed-form optimal strategies. Each variant carries its parameters;
/// they are validated on every evaluation.
namespace strategy {

/// Constant alpha_K.
struct FreeKelly {};

/// Power utility pi^eta / eta, eta < 1.
struct Crra {
    double eta = 0.0;
};

/// Growth of the capital above a fixed floor; a CPPI rule with multiplier alpha_K.
struct TerminalStop {
    double stop_level = 0.0;
};

/// Growth subject to pi_t >= lambda * m_t with m_t the running maximum.
struct Drawdown {
    double lambda = 0.0;
};

/// Maximise P(pi_T >= target) for target > 1.
struct BrowneTarget {
    double target = 0.0;
};

}  // namespace strategy

using AnalyticStrategy = std::variant<strategy::FreeKelly, strategy::Crra,
                                      strategy::TerminalStop, strategy::Drawdown,
                                      strategy::BrowneTarget>;

struct StrategyState {
    double pi = 1.0;
    double t = 0.0;
    /// Running maximum of discounted wealth; read by Drawdown only.
    double high_water = std::numeric_limits<double>::quiet_NaN();
};

/// Fraction of wealth in the risky asset.
///
/// TerminalStop and Drawdown return exactly 0 at their floors. BrowneTarget
/// returns 0 once pi >= target (the target is locked in by holding the
/// risk-free asset) and is otherwise evaluated through the separable form
/// alpha_K * f(target / pi) / sqrt(2 theta), which stays finite where the
/// direct formula degenerates to 0 * inf. Throws DomainError outside the
/// variant's domain.
double eval_strategy(const AnalyticStrategy& s, const StrategyState& state,
                     const DerivedParams& dp, double horizon);

/// Value function J(pi, t). At t = T this is the terminal reward: log pi,
/// pi^eta / eta, log(pi - pi_c), or pi / target for BrowneTarget (the
/// t -> T limit of the probability). Throws UnsupportedError for Drawdown.
double eval_value(const AnalyticStrategy& s, double pi, double t, const DerivedParams& dp,
                  double horizon);

/// f(z) = z * phi(Phi^{-1}(1/z)) for z >= 1, the separable profile of the
/// target-probability strategy in scaled variables.
double separable_f(double z);

/// Browne strategy in scaled form: u(z, theta) = f(z) / sqrt(2 theta), z = b / pi.
double browne_scaled(double z, double theta);

/// Central-difference estimate of f''(z) + lambda / (2 z^2 f(z)).
double separable_ode_residual(const std::function<double(double)>& f, double lambda, double z,
                              double h);

/// Central-difference estimate of F(x)^2 F''(x) + lambda x F'(x) / 2.
double selfsimilar_ode_residual(const std::function<double(double)>& F, double lambda, double x,
                                double h);

}  // namespace kellystop
