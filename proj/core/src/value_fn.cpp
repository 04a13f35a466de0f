#include "kellystop/value_fn.hpp"

#include "kellystop/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kellystop {

namespace {

constexpr double kMonotoneTolerance = 1e-12;

double half_sharpe_sq(const DerivedParams& dp) { return 0.5 * dp.sharpe * dp.sharpe; }

void check_monotone_grid(std::span<const double> x) {
    if (x.size() < 3) throw DomainError("need at least three samples");
    const bool up = x[1] > x[0];
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double d = x[i + 1] - x[i];
        if (!(up ? d > 0.0 : d < 0.0)) throw DomainError("sample nodes must be strictly monotone");
    }
}

}  // namespace

ResidualReport hjb_residual(const Field& value, const DerivedParams& dp, Point at, double h_pi,
                            double h_t) {
    const Derivatives d = central_differences(value, at, h_pi, h_t);
    if (std::abs(d.dxx) <= RefinementStudy::kTruncationMargin * d.err_dxx) {
        throw NumericalError("HJB residual singular: second derivative of J vanishes");
    }
    const double c = half_sharpe_sq(dp);
    ResidualReport rep;
    rep.at = at;
    rep.h_x = h_pi;
    rep.h_t = h_t;
    rep.residual = d.dt - c * d.dx * d.dx / d.dxx;
    rep.roundoff = d.err_dt + c * (2.0 * std::abs(d.dx) * d.err_dx / std::abs(d.dxx) +
                                   d.dx * d.dx * d.err_dxx / (d.dxx * d.dxx));
    return rep;
}

double strategy_from_value(const Field& value, const DerivedParams& dp, Point at, double h_pi) {
    const Derivatives d = central_differences(value, at, h_pi, 0.0);
    if (std::abs(d.dxx) <= RefinementStudy::kTruncationMargin * d.err_dxx) {
        throw NumericalError("strategy undefined: second derivative of J vanishes");
    }
    return -dp.alpha_kelly * d.dx / (at.x * d.dxx);
}

ValueCurve reconstruct_value(const std::function<double(double)>& u_of_z, double stop_level,
                             const ReconstructOptions& opts) {
    if (!(stop_level > 0.0)) throw DomainError("stop level must be positive");
    if (!(opts.pi_lo > stop_level)) throw DomainError("pi_lo must lie above the stop level");
    if (!(opts.pi_hi > opts.pi_lo)) throw DomainError("pi_hi must exceed pi_lo");
    if (opts.nodes < 3 || opts.tail_nodes < 3) throw DomainError("need at least three nodes");

    // log(pi d_pi J) at pi_hi: integral over z in [0, z_hi] of (1/u - 1)/z,
    // normalised so that it vanishes as pi -> infinity.
    auto tail_integrand = [&](double z) {
        const double u = u_of_z(z);
        if (!(u > 0.0)) throw DomainError("strategy must stay positive away from the stop");
        return (1.0 / u - 1.0) / z;
    };
    const double z_hi = stop_level / opts.pi_hi;
    const double dzt = z_hi / static_cast<double>(opts.tail_nodes - 1);
    double tail = 0.0;
    {
        const double g1 = tail_integrand(dzt);
        const double g2 = tail_integrand(2.0 * dzt);
        double prev = 2.0 * g1 - g2;  // limit at z -> 0
        for (std::size_t k = 1; k < opts.tail_nodes; ++k) {
            const double cur = k == 1 ? g1 : tail_integrand(static_cast<double>(k) * dzt);
            tail += 0.5 * dzt * (prev + cur);
            prev = cur;
        }
    }

    const std::size_t n = opts.nodes;
    const double x_lo = std::log(opts.pi_lo);
    const double dx = (std::log(opts.pi_hi) - x_lo) / static_cast<double>(n - 1);

    // Sweep downward from pi_hi; stop at the first node with u below the floor.
    std::vector<double> ux(n);
    std::vector<double> log_slope(n);
    std::size_t first = n - 1;
    ValueCurve curve;
    for (std::size_t k = n; k-- > 0;) {
        const double pi = std::exp(x_lo + static_cast<double>(k) * dx);
        const double u = u_of_z(stop_level / pi);
        if (!(u > opts.u_floor)) {
            curve.truncated = true;
            curve.truncated_below = pi;
            break;
        }
        ux[k] = u;
        if (k == n - 1) {
            log_slope[k] = tail;
        } else {
            log_slope[k] = log_slope[k + 1] +
                           0.5 * dx * ((1.0 / ux[k] - 1.0) + (1.0 / ux[k + 1] - 1.0));
        }
        first = k;
    }
    if (curve.truncated && first + 2 > n - 1) {
        throw DomainError("strategy below floor on almost the whole range");
    }

    const std::size_t m = n - first;
    curve.pi.resize(m);
    curve.value.resize(m);
    double acc = 0.0;
    for (std::size_t k = first; k < n; ++k) {
        const std::size_t q = k - first;
        curve.pi[q] = std::exp(x_lo + static_cast<double>(k) * dx);
        if (k > first) acc += 0.5 * dx * (std::exp(log_slope[k - 1]) + std::exp(log_slope[k]));
        curve.value[q] = acc;
    }

    ValueAnchor anchor;
    if (opts.anchor) {
        anchor = *opts.anchor;
        const double xr = std::log(anchor.pi_ref);
        const double x0 = std::log(curve.pi.front());
        if (!(anchor.pi_ref >= curve.pi.front() && anchor.pi_ref <= curve.pi.back())) {
            throw DomainError("anchor outside the reconstructed range");
        }
        const double pos = (xr - x0) / dx;
        const std::size_t i = std::min(static_cast<std::size_t>(pos), m - 2);
        const double w = pos - static_cast<double>(i);
        const double at_ref = curve.value[i] + w * (curve.value[i + 1] - curve.value[i]);
        const double shift = anchor.value_ref - at_ref;
        for (double& v : curve.value) v += shift;
    } else {
        const std::size_t mid = m / 2;
        anchor = {curve.pi[mid], 0.0};
        const double shift = -curve.value[mid];
        for (double& v : curve.value) v += shift;
    }
    curve.anchor = anchor;
    return curve;
}

ValueCurve reconstruct_value(const StrategySurface& surface, double theta, double stop_level,
                             const ReconstructOptions& opts) {
    if (!(theta >= 0.0 && theta <= surface.grid().theta_max() * (1.0 + 1e-12))) {
        throw DomainError("theta outside the surface");
    }
    return reconstruct_value([&](double z) { return surface.at(z, theta); }, stop_level, opts);
}

std::vector<double> slopes(std::span<const double> x, std::span<const double> f) {
    check_monotone_grid(x);
    if (f.size() != x.size()) throw DomainError("x and f sizes differ");
    const std::size_t n = x.size();
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1];
        const double h2 = x[i + 1] - x[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] +
               h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    {
        const double h1 = x[1] - x[0];
        const double h2 = x[2] - x[1];
        d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
               h1 / (h2 * (h1 + h2)) * f[2];
    }
    {
        const double h1 = x[n - 2] - x[n - 3];
        const double h2 = x[n - 1] - x[n - 2];
        d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] +
                   (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
    }
    return d;
}

std::vector<double> curvatures(std::span<const double> x, std::span<const double> f) {
    check_monotone_grid(x);
    if (f.size() != x.size()) throw DomainError("x and f sizes differ");
    const std::size_t n = x.size();
    if (n < 4) throw DomainError("need at least four samples for curvatures");
    std::vector<double> c(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1];
        const double h2 = x[i + 1] - x[i];
        c[i] = 2.0 * (f[i - 1] / (h1 * (h1 + h2)) - f[i] / (h1 * h2) + f[i + 1] / (h2 * (h1 + h2)));
    }
    // Linear extrapolation in x to the end nodes.
    auto extrapolate = [&](std::size_t e, std::size_t a, std::size_t b) {
        const double w = (x[e] - x[a]) / (x[b] - x[a]);
        return c[a] + w * (c[b] - c[a]);
    };
    c[0] = extrapolate(0, 1, 2);
    c[n - 1] = extrapolate(n - 1, n - 2, n - 3);
    return c;
}

TransformPair legendre_transform(std::span<const double> x, std::span<const double> f) {
    TransformPair out;
    out.p = slopes(x, f);
    const double scale = std::abs(*std::max_element(out.p.begin(), out.p.end(),
                                                    [](double a, double b) {
                                                        return std::abs(a) < std::abs(b);
                                                    }));
    const bool up = out.p[1] > out.p[0];
    for (std::size_t i = 0; i + 1 < out.p.size(); ++i) {
        const double d = out.p[i + 1] - out.p[i];
        const bool ok = up ? d > kMonotoneTolerance * scale : d < -kMonotoneTolerance * scale;
        if (!ok) {
            throw DomainError(
                "Legendre transform undefined: slopes are not strictly monotone "
                "(samples neither strictly convex nor strictly concave)");
        }
    }
    out.x.assign(x.begin(), x.end());
    out.g.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.g[i] = out.p[i] * x[i] - f[i];
    return out;
}

std::vector<double> transformed_investment(const TransformPair& pair, const DerivedParams& dp) {
    const std::vector<double> kpp = curvatures(pair.p, pair.g);
    std::vector<double> phi(kpp.size());
    for (std::size_t i = 0; i < kpp.size(); ++i) phi[i] = -dp.alpha_kelly * pair.p[i] * kpp[i];
    return phi;
}

ResidualReport transformed_hjb_residual(const Field& transformed_value, const DerivedParams& dp,
                                        Point at, double h_p, double h_t) {
    const Derivatives d = central_differences(transformed_value, at, h_p, h_t);
    const double c = half_sharpe_sq(dp) * at.x * at.x;
    ResidualReport rep;
    rep.at = at;
    rep.h_x = h_p;
    rep.h_t = h_t;
    rep.residual = d.dt + c * d.dxx;
    rep.roundoff = d.err_dt + c * d.err_dxx;
    return rep;
}

InvestmentResidual investment_pde_residual(const Field& phi, const DerivedParams& dp, Point at,
                                           double h_p, double h_t,
                                           const Field* transformed_value) {
    const Derivatives d = central_differences(phi, at, h_p, h_t);
    const double c = half_sharpe_sq(dp);
    const double p = at.x;
    InvestmentResidual out;
    out.residual.at = at;
    out.residual.h_x = h_p;
    out.residual.h_t = h_t;
    out.residual.residual = d.dt + c * (p * p * d.dxx + 2.0 * p * d.dx);
    out.residual.roundoff = d.err_dt + c * (p * p * d.err_dxx + 2.0 * std::abs(p) * d.err_dx);
    if (transformed_value != nullptr) {
        const Derivatives k = central_differences(*transformed_value, at, h_p, 0.0);
        out.consistency_defect = d.f + dp.alpha_kelly * p * k.dxx;
    }
    return out;
}

}  // namespace kellystop
