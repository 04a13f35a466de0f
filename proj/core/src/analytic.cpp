#include "kellystop/analytic.hpp"

#include "kellystop/error.hpp"
#include "kellystop/normal.hpp"

#include <cmath>

namespace kellystop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_crra(const strategy::Crra& s) {
    if (!(s.eta < 1.0)) throw DomainError("CRRA exponent must satisfy eta < 1");
}

void check_stop(const strategy::TerminalStop& s) {
    if (!(s.stop_level > 0.0)) throw DomainError("terminal stop level must be positive");
}

void check_drawdown(const strategy::Drawdown& s) {
    if (!(s.lambda >= 0.0 && s.lambda < 1.0)) {
        throw DomainError("drawdown fraction must lie in [0, 1)");
    }
}

void check_target(const strategy::BrowneTarget& s) {
    if (!(s.target > 1.0)) throw DomainError("target level must exceed 1");
}

double growth_rate(const DerivedParams& dp) { return 0.5 * dp.sharpe * dp.sharpe; }

}  // namespace

double eval_strategy(const AnalyticStrategy& s, const StrategyState& state,
                     const DerivedParams& dp, double horizon) {
    if (!(state.pi > 0.0)) throw DomainError("portfolio value must be positive");
    const double ak = dp.alpha_kelly;
    return std::visit(
        overloaded{
            [&](const strategy::FreeKelly&) { return ak; },
            [&](const strategy::Crra& c) {
                check_crra(c);
                return ak / (1.0 - c.eta);
            },
            [&](const strategy::TerminalStop& c) {
                check_stop(c);
                if (state.pi < c.stop_level) throw DomainError("pi below terminal stop level");
                return ak * (1.0 - c.stop_level / state.pi);
            },
            [&](const strategy::Drawdown& c) {
                check_drawdown(c);
                const double m = state.high_water;
                if (!std::isfinite(m) || !(m > 0.0)) {
                    throw DomainError("drawdown strategy needs a positive high-water mark");
                }
                const double floor = c.lambda * m;
                if (state.pi < floor || state.pi > m) {
                    throw DomainError("drawdown state must satisfy lambda*m <= pi <= m");
                }
                return ak * (1.0 - floor / state.pi);
            },
            [&](const strategy::BrowneTarget& c) {
                check_target(c);
                if (!(state.t < horizon)) throw DomainError("Browne strategy requires t < T");
                if (state.pi >= c.target) return 0.0;
                const double theta = (horizon - state.t) / dp.tau;
                return ak * browne_scaled(c.target / state.pi, theta);
            },
        },
        s);
}

double eval_value(const AnalyticStrategy& s, double pi, double t, const DerivedParams& dp,
                  double horizon) {
    if (!(pi > 0.0)) throw DomainError("portfolio value must be positive");
    if (t > horizon) throw DomainError("time beyond period end");
    const double remaining = horizon - t;
    return std::visit(
        overloaded{
            [&](const strategy::FreeKelly&) {
                return std::log(pi) + growth_rate(dp) * remaining;
            },
            [&](const strategy::Crra& c) {
                check_crra(c);
                if (c.eta == 0.0) {
                    throw DomainError("pi^eta/eta is undefined at eta = 0; use FreeKelly");
                }
                const double e = c.eta;
                return std::pow(pi, e) / e *
                       std::exp(dp.sharpe * dp.sharpe * e * remaining / (2.0 * (1.0 - e)));
            },
            [&](const strategy::TerminalStop& c) {
                check_stop(c);
                if (!(pi > c.stop_level)) throw DomainError("value requires pi > stop level");
                return std::log(pi - c.stop_level) + growth_rate(dp) * remaining;
            },
            [&](const strategy::Drawdown&) -> double {
                throw UnsupportedError("drawdown strategy has no closed-form value function");
            },
            [&](const strategy::BrowneTarget& c) {
                check_target(c);
                if (pi >= c.target) return 1.0;
                const double ratio = pi / c.target;
                if (remaining == 0.0) return ratio;
                return normal::cdf(normal::quantile(ratio) + dp.sharpe * std::sqrt(remaining));
            },
        },
        s);
}

double separable_f(double z) {
    if (!(z >= 1.0)) throw DomainError("separable profile requires z >= 1");
    if (z == 1.0) return 0.0;
    return z * normal::pdf(normal::quantile(1.0 / z));
}

double browne_scaled(double z, double theta) {
    if (!(theta > 0.0)) throw DomainError("Browne scaled strategy requires theta > 0");
    return separable_f(z) / std::sqrt(2.0 * theta);
}

double separable_ode_residual(const std::function<double(double)>& f, double lambda, double z,
                              double h) {
    const double f0 = f(z);
    if (f0 == 0.0 || !std::isfinite(f0)) throw NumericalError("separable ODE singular: f(z) = 0");
    if (z == 0.0) throw NumericalError("separable ODE singular at z = 0");
    const double d2 = (f(z + h) - 2.0 * f0 + f(z - h)) / (h * h);
    return d2 + lambda / (2.0 * z * z * f0);
}

double selfsimilar_ode_residual(const std::function<double(double)>& F, double lambda, double x,
                                double h) {
    const double fp = F(x + h);
    const double f0 = F(x);
    const double fm = F(x - h);
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    return f0 * f0 * d2 + 0.5 * lambda * x * d1;
}

}  // namespace kellystop
