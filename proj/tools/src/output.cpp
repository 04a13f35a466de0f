#include "kellystop/cli/cli.hpp"
#include "output.hpp"

#include <json.hpp>

#include <charconv>
#include <ostream>
#include <system_error>

namespace kellystop::cli {

std::string format_number(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

void write_table(std::ostream& os, const Table& t, Format fmt) {
    if (fmt == Format::csv) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            os << (c ? "," : "") << t.columns[c];
        }
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
            os << '\n';
        }
        return;
    }
    nlohmann::json j;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    os << j.dump(1) << '\n';
}

void write_surface_csv(std::ostream& os, const StrategySurface& s) {
    const Grid& g = s.grid();
    os << "z,theta,u\n";
    for (std::size_t j = 0; j < s.plane_count(); ++j) {
        const std::string th = format_number(s.plane_theta(j));
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            os << format_number(g.z(i)) << ',' << th << ',' << format_number(s.value(j, i)) << '\n';
        }
    }
}

void write_surface_json(std::ostream& os, const StrategySurface& s, const RunConfig& cfg,
                        const DerivedParams& dp) {
    const Grid& g = s.grid();
    nlohmann::json j;
    j["params"] = {{"mu", dp.market.mu},
                   {"r", dp.market.r},
                   {"sigma", dp.market.sigma},
                   {"alpha_kelly", dp.alpha_kelly},
                   {"sharpe", dp.sharpe},
                   {"tau", dp.tau},
                   {"period_years", cfg.period_years},
                   {"stop_delta", cfg.stop_delta}};
    j["grid"] = {{"nz", g.nz()},
                 {"dz", g.dz()},
                 {"dtheta", g.dtheta()},
                 {"ntheta", g.ntheta()},
                 {"theta_max", g.theta_max()},
                 {"stability_ratio", g.stability_ratio()},
                 {"stride", s.stride()},
                 {"planes", s.plane_count()}};
    std::vector<double> theta(s.plane_count());
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = s.plane_theta(k);
    j["theta"] = theta;
    auto& values = j["values"] = nlohmann::json::array();
    for (std::size_t k = 0; k < s.plane_count(); ++k) {
        const auto p = s.plane(k);
        values.push_back(std::vector<double>(p.begin(), p.end()));
    }
    os << j.dump() << '\n';
}

void write_value_csv(std::ostream& os, const ValueCurve& c) {
    os << "pi,J\n";
    for (std::size_t i = 0; i < c.pi.size(); ++i) {
        os << format_number(c.pi[i]) << ',' << format_number(c.value[i]) << '\n';
    }
}

nlohmann::json sim_json(const SimResult& r, const std::string& strategy) {
    return {{"strategy", strategy},
            {"mean_log_growth", r.mean_log_growth},
            {"std_error", r.std_error},
            {"stop_hit_rate", r.stop_hit_rate},
            {"max_drawdown", r.max_drawdown},
            {"max_constraint_violation", r.max_constraint_violation},
            {"n_paths", r.n_paths},
            {"n_steps", r.n_steps},
            {"seed", r.seed},
            {"rng", r.rng}};
}

void write_sim_json(std::ostream& os, const SimResult& r, const std::string& strategy,
                    const RunConfig& cfg) {
    nlohmann::json j = sim_json(r, strategy);
    j["config"] = {{"mu", cfg.market.mu},
                   {"r", cfg.market.r},
                   {"sigma", cfg.market.sigma},
                   {"period_years", cfg.period_years},
                   {"stop_level", cfg.stop_level()}};
    os << j.dump(1) << '\n';
}

void write_json(std::ostream& os, const nlohmann::json& j) { os << j.dump(1) << '\n'; }

}  // namespace kellystop::cli
