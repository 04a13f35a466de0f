#include "kellystop/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kellystop {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

double default_step(double x) noexcept { return 1e-4 * std::max(std::abs(x), 1.0); }

Derivatives central_differences(const Field& f, Point p, double h_x, double h_t) {
    Derivatives d;
    const double f0 = f(p.x, p.t);
    const double fxp = f(p.x + h_x, p.t);
    const double fxm = f(p.x - h_x, p.t);
    d.f = f0;
    d.dx = (fxp - fxm) / (2.0 * h_x);
    d.dxx = (fxp - 2.0 * f0 + fxm) / (h_x * h_x);
    const double mx = std::max({std::abs(f0), std::abs(fxp), std::abs(fxm)});
    d.err_dx = kEps * mx / h_x;
    d.err_dxx = 4.0 * kEps * mx / (h_x * h_x);
    if (h_t > 0.0) {
        const double ftp = f(p.x, p.t + h_t);
        const double ftm = f(p.x, p.t - h_t);
        d.dt = (ftp - ftm) / (2.0 * h_t);
        d.err_dt = kEps * std::max({std::abs(ftp), std::abs(ftm)}) / h_t;
    }
    return d;
}

double observed_order(double h1, double e1, double h2, double e2) {
    return std::log(e1 / e2) / std::log(h1 / h2);
}

double richardson_order(double h1, double h2, double h3, double d12, double d23) {
    if (!(d12 > 0.0) || !(d23 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double target = std::log(d12 / d23);
    auto g = [&](double p) {
        return std::log((std::pow(h1, p) - std::pow(h2, p)) / (std::pow(h2, p) - std::pow(h3, p))) -
               target;
    };
    double lo = 1e-6;
    double hi = 10.0;
    double glo = g(lo);
    const double ghi = g(hi);
    if (!(glo * ghi < 0.0)) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

bool RefinementStudy::converges_at(double order) const noexcept {
    if (exact) return true;
    return !orders.empty() && min_order >= order;
}

RefinementStudy refine(const std::function<ResidualReport(double)>& residual_at, double h_max,
                       double h_min) {
    RefinementStudy study;
    for (double h = h_max;; h *= 0.5) {
        const ResidualReport rep = residual_at(h);
        study.rows.push_back({h, std::abs(rep.residual), rep.roundoff});
        if (h <= h_min) break;
    }
    const double margin = RefinementStudy::kTruncationMargin;
    for (std::size_t k = 0; k + 1 < study.rows.size(); ++k) {
        const auto& a = study.rows[k];
        const auto& b = study.rows[k + 1];
        if (b.residual > margin * b.roundoff && a.residual > margin * a.roundoff) {
            study.orders.push_back(observed_order(a.h, a.residual, b.h, b.residual));
        }
    }
    if (study.orders.empty()) {
        study.min_order = std::numeric_limits<double>::quiet_NaN();
        study.exact = std::all_of(study.rows.begin(), study.rows.end(), [&](const RefinementRow& r) {
            return r.residual <= margin * r.roundoff;
        });
    } else {
        study.min_order = *std::min_element(study.orders.begin(), study.orders.end());
    }
    return study;
}

}  // namespace kellystop
