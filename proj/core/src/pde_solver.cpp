#include "kellystop/pde_solver.hpp"

#include "kellystop/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kellystop {

namespace {

// Interior update of one explicit step; out[0] and out[n-1] are copied.
void advance(const double* in, double* out, std::size_t n, double dtheta, double dz) {
    const double c = dtheta / (dz * dz);
    out[0] = in[0];
    out[n - 1] = in[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double z = static_cast<double>(i) * dz;
        const double u = in[i];
        out[i] = u + c * u * u * z * z * (in[i + 1] - 2.0 * u + in[i - 1]);
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

StopLossProblem StopLossProblem::make(std::size_t nz, double theta_max, std::size_t max_planes,
                                      double ratio) {
    if (max_planes < 2) throw DomainError("at least two stored planes are required");
    Grid grid = Grid::for_horizon(nz, theta_max, ratio);
    const std::size_t intervals = max_planes - 1;
    const std::size_t stride = std::max<std::size_t>(1, (grid.ntheta() + intervals - 1) / intervals);
    return {grid, stride};
}

StrategySurface solve_stop_loss(const StopLossProblem& problem) {
    const Grid& grid = problem.grid;
    const std::size_t n = grid.node_count();
    const std::size_t stride = problem.stride;
    const std::size_t planes = StrategySurface::planes_for(grid, stride);

    std::vector<double> values;
    values.reserve(planes * n);

    std::vector<double> cur(n, 1.0);
    cur[n - 1] = 0.0;
    std::vector<double> next(n);
    values.insert(values.end(), cur.begin(), cur.end());

    for (std::size_t step = 1; step <= grid.ntheta(); ++step) {
        advance(cur.data(), next.data(), n, grid.dtheta(), grid.dz());
        cur.swap(next);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double u = cur[i];
            if (!(u >= 0.0 && u <= 1.0)) {
                throw NumericalError("explicit Euler left [0,1] at step " + std::to_string(step) +
                                     ", node " + std::to_string(i) + " (u = " +
                                     std::to_string(u) + "); stability ratio " +
                                     std::to_string(grid.stability_ratio()));
            }
        }
        if (step % stride == 0 || step == grid.ntheta()) {
            values.insert(values.end(), cur.begin(), cur.end());
        }
    }
    return StrategySurface(grid, stride, std::move(values), ProblemKind::stop_loss);
}

std::vector<double> step_explicit_euler(std::span<const double> row, double dtheta, double dz) {
    if (row.size() < 2) throw DomainError("row needs both boundary entries");
    std::vector<double> out(row.size());
    advance(row.data(), out.data(), row.size(), dtheta, dz);
    return out;
}

ResidualReport pde_residual_alpha(const Field& alpha, double sigma, Point at, double h_pi,
                                  double h_t) {
    const Derivatives d = central_differences(alpha, at, h_pi, h_t);
    const double pi = at.x;
    const double coef = 0.5 * sigma * sigma * d.f * d.f;
    ResidualReport rep;
    rep.at = at;
    rep.h_x = h_pi;
    rep.h_t = h_t;
    rep.residual = d.dt + coef * (pi * pi * d.dxx + 2.0 * pi * d.dx);
    rep.roundoff = d.err_dt + std::abs(coef) * (pi * pi * d.err_dxx + 2.0 * std::abs(pi) * d.err_dx);
    return rep;
}

ResidualReport pde_residual_gamma(const Field& gamma, double sigma, Point at, double h_pi,
                                  double h_t) {
    const Derivatives d = central_differences(gamma, at, h_pi, h_t);
    const double coef = 0.5 * sigma * sigma * d.f * d.f;
    ResidualReport rep;
    rep.at = at;
    rep.h_x = h_pi;
    rep.h_t = h_t;
    rep.residual = d.dt + coef * d.dxx;
    rep.roundoff = d.err_dt + std::abs(coef) * d.err_dxx;
    return rep;
}

BalanceReport self_financing_balance(const StrategySurface& surface, const DerivedParams& dp,
                                     double stop_level, double horizon, Point at) {
    const Grid& grid = surface.grid();
    const ScaledState st = to_scaled(at.x, at.t, stop_level, horizon, dp);
    if (!(st.z > 0.0 && st.z < 1.0)) throw DomainError("balance check needs 0 < z < 1");
    if (!(st.theta > 0.0 && st.theta < grid.theta_max())) {
        throw DomainError("balance check needs 0 < theta < theta_max");
    }
    if (surface.plane_count() < 3) throw DomainError("balance check needs three stored planes");

    const auto node = static_cast<std::size_t>(std::lround(st.z / grid.dz()));
    const std::size_t i = std::clamp<std::size_t>(node, 1, grid.nz());

    std::size_t j = 1;
    double best = std::abs(surface.plane_theta(1) - st.theta);
    for (std::size_t k = 2; k + 1 < surface.plane_count(); ++k) {
        const double dist = std::abs(surface.plane_theta(k) - st.theta);
        if (dist < best) {
            best = dist;
            j = k;
        }
    }

    const double z = grid.z(i);
    const double dz = grid.dz();
    const double u = surface.value(j, i);
    const double u_zz =
        (surface.value(j, i + 1) - 2.0 * u + surface.value(j, i - 1)) / (dz * dz);
    const double span = surface.plane_theta(j + 1) - surface.plane_theta(j - 1);
    const double u_theta = (surface.value(j + 1, i) - surface.value(j - 1, i)) / span;

    BalanceReport rep;
    rep.scaled_defect = u * u * z * z * u_zz - u_theta;
    const double pi = stop_level / z;
    rep.defect.at = {pi, horizon - surface.plane_theta(j) * dp.tau};
    rep.defect.h_x = dz;
    rep.defect.h_t = 0.5 * span;
    rep.defect.residual = dp.alpha_kelly * pi / dp.tau * rep.scaled_defect;
    rep.scheme_scale = dz * dz + grid.dtheta();
    rep.constant = std::abs(rep.scaled_defect) / rep.scheme_scale;
    return rep;
}

Curve extract_slice(const StrategySurface& surface, const SliceSpec& spec) {
    Curve c;
    auto along_theta = [&](double z) {
        if (!(z >= 0.0 && z <= 1.0)) throw DomainError("slice z outside [0, 1]");
        c.coord.reserve(surface.plane_count());
        c.u.reserve(surface.plane_count());
        for (std::size_t j = 0; j < surface.plane_count(); ++j) {
            const double th = surface.plane_theta(j);
            c.coord.push_back(th);
            c.u.push_back(surface.at(z, th));
        }
    };
    std::visit(overloaded{
                   [&](const slice::FixedZ& s) { along_theta(s.z); },
                   [&](const slice::FixedDelta& s) {
                       if (!(s.delta >= 0.0 && s.delta <= 1.0)) {
                           throw DomainError("slice delta outside [0, 1]");
                       }
                       along_theta(1.0 - s.delta);
                   },
                   [&](const slice::FixedTheta& s) {
                       const Grid& g = surface.grid();
                       if (!(s.theta >= 0.0 && s.theta <= g.theta_max() * (1.0 + 1e-12))) {
                           throw DomainError("slice theta outside [0, theta_max]");
                       }
                       for (std::size_t i = 0; i < g.node_count(); ++i) {
                           c.coord.push_back(g.z(i));
                           c.u.push_back(surface.at(g.z(i), s.theta));
                       }
                   },
               },
               spec);
    return c;
}

StrategySurface linear_profile_surface(const Grid& grid, std::size_t stride) {
    const std::size_t n = grid.node_count();
    const std::size_t planes = StrategySurface::planes_for(grid, stride);
    std::vector<double> values(planes * n);
    for (std::size_t j = 0; j < planes; ++j) {
        for (std::size_t i = 0; i < n; ++i) values[j * n + i] = 1.0 - grid.z(i);
        values[j * n + n - 1] = 0.0;
    }
    return StrategySurface(grid, stride, std::move(values), ProblemKind::stop_loss);
}

}  // namespace kellystop
