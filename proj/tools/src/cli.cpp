#include "kellystop/cli/cli.hpp"
#include "output.hpp"

#include "kellystop/analytic.hpp"
#include "kellystop/error.hpp"
#include "kellystop/multi_asset.hpp"
#include "kellystop/pde_solver.hpp"
#include "kellystop/stencil.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace kellystop::cli {

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    return f;
}

void finish(std::ofstream& f, const std::string& path) {
    f.flush();
    if (!f) throw IoError("write to " + path + " failed");
}

// ---------------------------------------------------------------------------
// Shared setup

DerivedParams market_or_throw(const RunConfig& cfg) { return derive_params(cfg.market); }

StrategySurface solve_for(const RunConfig& cfg, const DerivedParams& dp, double theta_max,
                          std::size_t max_planes) {
    if (!(dp.alpha_kelly > 0.0)) {
        throw DomainError("stop-loss solver needs a positive risk premium (mu > r)");
    }
    if (cfg.dtheta) {
        const double dth = *cfg.dtheta;
        if (!(dth > 0.0)) throw ConfigError("dtheta must be positive");
        const auto steps = static_cast<std::size_t>(std::ceil(theta_max / dth - 1e-9));
        const Grid grid(cfg.nz, dth, std::max<std::size_t>(steps, 1));
        const std::size_t stride =
            std::max<std::size_t>(1, (grid.ntheta() + max_planes - 2) / (max_planes - 1));
        return solve_stop_loss({grid, stride});
    }
    return solve_stop_loss(StopLossProblem::make(cfg.nz, theta_max, max_planes));
}

double period_theta(const RunConfig& cfg, const DerivedParams& dp) {
    return cfg.theta_max.value_or(cfg.period_years / dp.tau);
}

SimConfig sim_config(const RunConfig& cfg) {
    SimConfig sc;
    sc.n_paths = cfg.paths;
    sc.n_steps = cfg.steps;
    sc.seed = cfg.seed;
    sc.horizon = cfg.period_years;
    sc.stop_level = cfg.stop_level();
    return sc;
}

// Strategy names: none, kelly, terminal, solved, half, double, kappa=<x>.
NamedStrategy make_strategy(const std::string& name, const RunConfig& cfg,
                            const DerivedParams& dp,
                            const std::function<const StrategySurface&()>& surface) {
    const double T = cfg.period_years;
    const double pc = cfg.stop_level();
    if (name == "none") return {name, constant_strategy(0.0)};
    if (name == "kelly") return {name, constant_strategy(dp.alpha_kelly)};
    if (name == "terminal") return {name, analytic_strategy(strategy::TerminalStop{pc}, dp, T)};
    double kappa = 0.0;
    if (name == "solved") {
        kappa = 1.0;
    } else if (name == "half") {
        kappa = 0.5;
    } else if (name == "double") {
        kappa = 2.0;
    } else if (name.rfind("kappa=", 0) == 0) {
        try {
            std::size_t used = 0;
            kappa = std::stod(name.substr(6), &used);
            if (used != name.size() - 6) throw std::invalid_argument(name);
        } catch (const std::exception&) {
            throw ConfigError("bad strategy scale in '" + name + "'");
        }
    } else {
        throw ConfigError("unknown strategy '" + name +
                          "' (none, kelly, terminal, solved, half, double, kappa=<x>)");
    }
    return {name, surface_strategy(surface(), dp, pc, T, kappa, cfg.var_cap)};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const auto dp = market_or_throw(cfg);
    const auto s = solve_for(cfg, dp, period_theta(cfg, dp), cfg.max_planes);
    const bool csv = !cfg.format || *cfg.format == Format::csv;
    const bool json = !cfg.format || *cfg.format == Format::json;
    if (csv) {
        const std::string path = cfg.out + ".csv";
        auto f = open_output(path);
        write_surface_csv(f, s);
        finish(f, path);
    }
    if (json) {
        const std::string path = cfg.out + ".json";
        auto f = open_output(path);
        write_surface_json(f, s, cfg, dp);
        finish(f, path);
    }
    out << "solved nz=" << s.grid().nz() << " theta_max=" << format_number(s.grid().theta_max())
        << " steps=" << s.grid().ntheta() << " ratio=" << format_number(s.grid().stability_ratio())
        << '\n';
    return 0;
}

int cmd_figure(const RunConfig& cfg, const std::string& which, std::ostream& out) {
    const auto dp = market_or_throw(cfg);
    Table t;
    if (which == "1a") {
        const auto s = solve_for(cfg, dp, 1.0, 101);
        t.columns = {"z", "theta", "u"};
        for (std::size_t j = 0; j < s.plane_count(); ++j) {
            for (std::size_t i = 0; i < s.grid().node_count(); ++i) {
                t.rows.push_back({s.grid().z(i), s.plane_theta(j), s.value(j, i)});
            }
        }
    } else if (which == "1b") {
        const auto s = solve_for(cfg, dp, cfg.period_years / dp.tau, 201);
        const double deltas[] = {0.01, 0.05, 0.10, 0.20};
        t.columns = {"weeks_to_reset", "delta_0.01", "delta_0.05", "delta_0.10", "delta_0.20"};
        std::vector<Curve> c;
        for (double d : deltas) c.push_back(extract_slice(s, slice::FixedDelta{d}));
        const double week = to_years(1.0, TimeUnit::weeks);
        for (std::size_t j = 0; j < c[0].coord.size(); ++j) {
            t.rows.push_back({c[0].coord[j] * dp.tau / week, c[0].u[j], c[1].u[j], c[2].u[j],
                              c[3].u[j]});
        }
    } else if (which == "2a") {
        const auto s = solve_for(cfg, dp, 2.0, 201);
        const double thetas[] = {0.01, 0.1, 0.5, 2.0};
        t.columns = {"z", "theta_0.01", "theta_0.1", "theta_0.5", "theta_2", "limit"};
        std::vector<Curve> c;
        for (double th : thetas) c.push_back(extract_slice(s, slice::FixedTheta{th}));
        for (std::size_t i = 0; i < c[0].coord.size(); ++i) {
            const double z = c[0].coord[i];
            t.rows.push_back({z, c[0].u[i], c[1].u[i], c[2].u[i], c[3].u[i], 1.0 - z});
        }
    } else if (which == "2b") {
        const auto s = solve_for(cfg, dp, cfg.theta_max.value_or(5.0), 501);
        const auto c = extract_slice(s, slice::FixedZ{0.85});
        t.columns = {"theta", "u", "limit"};
        for (std::size_t j = 0; j < c.coord.size(); ++j) t.rows.push_back({c.coord[j], c.u[j], 0.15});
    } else {
        throw ConfigError("unknown figure '" + which + "' (1a, 1b, 2a, 2b)");
    }
    const Format fmt = cfg.format.value_or(Format::csv);
    const std::string path = cfg.out + (fmt == Format::csv ? ".csv" : ".json");
    auto f = open_output(path);
    write_table(f, t, fmt);
    finish(f, path);
    out << "figure " << which << ": " << t.rows.size() << " rows -> " << path << '\n';
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& name, bool path_summaries,
                 std::ostream& out) {
    const auto dp = market_or_throw(cfg);
    std::optional<StrategySurface> surface;
    const auto get = [&]() -> const StrategySurface& {
        if (!surface) surface = solve_for(cfg, dp, period_theta(cfg, dp), cfg.max_planes);
        return *surface;
    };
    const auto strat = make_strategy(name, cfg, dp, get);
    auto sc = sim_config(cfg);
    sc.keep_paths = path_summaries;
    const auto r = simulate(sc, dp, strat.fn);

    const Format fmt = cfg.format.value_or(Format::json);
    const std::string path = cfg.out + (fmt == Format::csv ? ".csv" : ".json");
    auto f = open_output(path);
    if (fmt == Format::json) {
        write_sim_json(f, r, name, cfg);
    } else {
        f << "strategy,mean_log_growth,std_error,stop_hit_rate,max_drawdown,n_paths,n_steps,seed\n"
          << name << ',' << format_number(r.mean_log_growth) << ',' << format_number(r.std_error)
          << ',' << format_number(r.stop_hit_rate) << ',' << format_number(r.max_drawdown) << ','
          << r.n_paths << ',' << r.n_steps << ',' << r.seed << '\n';
    }
    finish(f, path);
    if (path_summaries) {
        const std::string pp = cfg.out + "_paths.csv";
        auto g = open_output(pp);
        g << "path,log_terminal,stopped,stop_time,max_drawdown\n";
        for (std::size_t k = 0; k < r.paths.size(); ++k) {
            const auto& p = r.paths[k];
            g << k << ',' << format_number(p.log_terminal) << ',' << (p.stopped ? 1 : 0) << ','
              << format_number(p.stop_time) << ',' << format_number(p.max_drawdown) << '\n';
        }
        finish(g, pp);
    }
    out << name << ": mean_log_growth=" << format_number(r.mean_log_growth)
        << " std_error=" << format_number(r.std_error)
        << " stop_hit_rate=" << format_number(r.stop_hit_rate) << '\n';
    return 0;
}

int cmd_compare(const RunConfig& cfg, const std::vector<std::string>& names, std::ostream& out) {
    if (names.size() < 2) throw ConfigError("compare needs at least two strategies");
    const auto dp = market_or_throw(cfg);
    std::optional<StrategySurface> surface;
    const auto get = [&]() -> const StrategySurface& {
        if (!surface) surface = solve_for(cfg, dp, period_theta(cfg, dp), cfg.max_planes);
        return *surface;
    };
    std::vector<NamedStrategy> list;
    for (const auto& n : names) list.push_back(make_strategy(n, cfg, dp, get));
    const auto cmp = compare_strategies(sim_config(cfg), dp, list);

    const Format fmt = cfg.format.value_or(Format::csv);
    const std::string path = cfg.out + (fmt == Format::csv ? ".csv" : ".json");
    auto f = open_output(path);
    if (fmt == Format::csv) {
        f << "rank,strategy,mean_log_growth,std_error,gap_to_best,gap_std_error,stop_hit_rate\n";
        for (std::size_t k = 0; k < cmp.ranked.size(); ++k) {
            const auto& e = cmp.ranked[k];
            f << k + 1 << ',' << e.name << ',' << format_number(e.result.mean_log_growth) << ','
              << format_number(e.result.std_error) << ',' << format_number(e.gap_to_best) << ','
              << format_number(e.gap_std_error) << ',' << format_number(e.result.stop_hit_rate)
              << '\n';
        }
    } else {
        nlohmann::json j;
        j["ranked"] = nlohmann::json::array();
        for (const auto& e : cmp.ranked) {
            auto row = sim_json(e.result, e.name);
            row["gap_to_best"] = e.gap_to_best;
            row["gap_std_error"] = e.gap_std_error;
            j["ranked"].push_back(row);
        }
        j["order"] = names;
        j["pairwise_difference"] = cmp.pairwise_difference;
        j["pairwise_std_error"] = cmp.pairwise_std_error;
        write_json(f, j);
    }
    finish(f, path);
    for (std::size_t k = 0; k < cmp.ranked.size(); ++k) {
        const auto& e = cmp.ranked[k];
        out << k + 1 << ". " << e.name << " " << format_number(e.result.mean_log_growth)
            << " (gap " << format_number(e.gap_to_best) << " +- "
            << format_number(e.gap_std_error) << ")\n";
    }
    return 0;
}

int cmd_reconstruct(const RunConfig& cfg, std::optional<double> theta, std::optional<double> lo,
                    std::optional<double> hi, std::size_t nodes, std::ostream& out) {
    const auto dp = market_or_throw(cfg);
    const double th = theta.value_or(period_theta(cfg, dp));
    const auto s = solve_for(cfg, dp, th, cfg.max_planes);
    const double pc = cfg.stop_level();
    ReconstructOptions opts;
    opts.pi_lo = lo.value_or(1.01 * pc);
    opts.pi_hi = hi.value_or(10.0 * pc);
    opts.nodes = nodes;
    const auto c = reconstruct_value(s, s.grid().theta_max(), pc, opts);

    const Format fmt = cfg.format.value_or(Format::csv);
    const std::string path = cfg.out + (fmt == Format::csv ? ".csv" : ".json");
    auto f = open_output(path);
    if (fmt == Format::csv) {
        write_value_csv(f, c);
    } else {
        nlohmann::json j;
        j["theta"] = s.grid().theta_max();
        j["stop_level"] = pc;
        j["anchor"] = {{"pi_ref", c.anchor.pi_ref}, {"value_ref", c.anchor.value_ref}};
        j["truncated"] = c.truncated;
        if (c.truncated) j["truncated_below"] = c.truncated_below;
        j["pi"] = c.pi;
        j["J"] = c.value;
        write_json(f, j);
    }
    finish(f, path);
    out << "value curve: " << c.pi.size() << " nodes" << (c.truncated ? " (truncated)" : "")
        << " -> " << path << '\n';
    return 0;
}

int cmd_multi_asset(const RunConfig& cfg, const std::vector<double>& excess,
                    const std::vector<double>& cov, double u, std::ostream& out) {
    if (excess.empty()) throw ConfigError("--excess is required");
    const MultiAssetParams mp{excess, cov};
    const auto st = kelly_portfolio_stats(mp);
    // The Kelly portfolio's Sharpe ratio equals sigma_K.
    const double fraction = cfg.var_cap ? apply_var_cap(u, *cfg.var_cap, st.sigma_kelly) : u;
    const auto alloc = scale_to_multi(fraction, st.weights);

    const Format fmt = cfg.format.value_or(Format::json);
    const std::string path = cfg.out + (fmt == Format::csv ? ".csv" : ".json");
    auto f = open_output(path);
    if (fmt == Format::csv) {
        f << "asset,kelly_weight,allocation\n";
        for (std::size_t k = 0; k < alloc.size(); ++k) {
            f << k << ',' << format_number(st.weights[k]) << ',' << format_number(alloc[k]) << '\n';
        }
    } else {
        nlohmann::json j;
        j["kelly_weights"] = st.weights;
        j["mu_kelly"] = st.mu_kelly;
        j["sigma_kelly"] = st.sigma_kelly;
        j["variance_kelly"] = st.variance_kelly;
        j["fraction"] = fraction;
        j["allocation"] = alloc;
        write_json(f, j);
    }
    finish(f, path);
    out << "mu_K=" << format_number(st.mu_kelly) << " sigma_K=" << format_number(st.sigma_kelly)
        << " fraction=" << format_number(fraction) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// check: residual operators against closed-form solutions

struct Check {
    std::string name;
    std::function<std::pair<bool, std::string>()> body;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

std::pair<bool, std::string> order_check(const std::function<ResidualReport(double)>& at) {
    const auto st = refine(at, 1e-2, 1e-4);
    return {st.converges_at(1.9), st.exact ? "stencil-exact" : "order " + num(st.min_order)};
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
    const auto dp = market_or_throw(cfg);
    const double T = 1.0;
    const double pc = 0.9;
    const Point at{1.2, 0.5};
    const double sig = dp.market.sigma;
    const double hs = 0.5 * dp.sharpe * dp.sharpe;

    const auto alpha_of = [&](AnalyticStrategy s) -> Field {
        return [s, &dp, T](double pi, double t) { return eval_strategy(s, {pi, t}, dp, T); };
    };
    const auto value_of = [&](AnalyticStrategy s) -> Field {
        return [s, &dp, T](double pi, double t) { return eval_value(s, pi, t, dp, T); };
    };
    const Field kelly_K = [&](double p, double t) { return 1.0 + std::log(p) - hs * (T - t); };
    const Field stop_K = [&](double p, double t) {
        return p * pc + 1.0 + std::log(p) - hs * (T - t);
    };
    const Field phi = [&](double p, double) { return dp.alpha_kelly / p; };

    std::vector<Check> checks;
    const std::pair<const char*, AnalyticStrategy> alphas[] = {
        {"free", strategy::FreeKelly{}},
        {"terminal", strategy::TerminalStop{pc}},
        {"browne", strategy::BrowneTarget{1.5}}};
    for (const auto& [name, s] : alphas) {
        const Field a = alpha_of(s);
        checks.push_back({std::string("alpha pde: ") + name, [=, &at] {
                              return order_check([&](double h) {
                                  return pde_residual_alpha(a, sig, at, h * at.x, h);
                              });
                          }});
    }
    {
        const Field cppi = [&](double pi, double) { return dp.alpha_kelly * (pi - pc); };
        const Field a = alpha_of(strategy::BrowneTarget{1.5});
        const Field browne = [a](double pi, double t) { return pi * a(pi, t); };
        checks.push_back({"gamma pde: terminal", [=, &at] {
                              return order_check([&](double h) {
                                  return pde_residual_gamma(cppi, sig, at, h * at.x, h);
                              });
                          }});
        checks.push_back({"gamma pde: browne", [=, &at] {
                              return order_check([&](double h) {
                                  return pde_residual_gamma(browne, sig, at, h * at.x, h);
                              });
                          }});
    }
    const std::pair<const char*, AnalyticStrategy> values[] = {
        {"free", strategy::FreeKelly{}},
        {"terminal", strategy::TerminalStop{pc}},
        {"crra -1", strategy::Crra{-1.0}},
        {"crra 0.5", strategy::Crra{0.5}}};
    for (const auto& [name, s] : values) {
        const Field J = value_of(s);
        checks.push_back({std::string("hjb: ") + name, [=, &dp, &at] {
                              return order_check([&](double h) {
                                  return hjb_residual(J, dp, at, h * at.x, h);
                              });
                          }});
        const Field a = alpha_of(s);
        checks.push_back({std::string("control from value: ") + name, [=, &dp, &at] {
                              const double got = strategy_from_value(J, dp, at, 1e-4 * at.x);
                              const double want = a(at.x, at.t);
                              const double rel = std::abs(got - want) / std::abs(want);
                              return std::pair{rel < 1e-6, "rel err " + num(rel)};
                          }});
    }
    for (const auto& [name, K] : {std::pair{"free", kelly_K}, std::pair{"terminal", stop_K}}) {
        checks.push_back({std::string("transformed hjb: ") + name, [=, &dp, &at] {
                              return order_check([&](double h) {
                                  return transformed_hjb_residual(K, dp, at, h * at.x, h);
                              });
                          }});
        checks.push_back({std::string("investment pde: ") + name, [=, &dp, &at] {
                              const auto r = investment_pde_residual(phi, dp, at, 1e-3, 1e-3, &K);
                              const bool ok = std::abs(r.residual.residual) <=
                                                  10.0 * r.residual.roundoff + 1e-9 &&
                                              std::abs(*r.consistency_defect) < 1e-5;
                              return std::pair{ok, "residual " + num(r.residual.residual) +
                                                       ", phi defect " +
                                                       num(*r.consistency_defect)};
                          }});
    }
    checks.push_back({"separable ode", [] {
                          const double r = separable_ode_residual(
                              [](double z) { return separable_f(z); }, 2.0, 2.0, 1e-4);
                          return std::pair{std::abs(r) < 1e-5, "residual " + num(r)};
                      }});
    checks.push_back({"solver boundaries and bounds", [] {
                          const auto s = solve_stop_loss(StopLossProblem::make(50, 1.0));
                          const std::size_t n = s.grid().node_count();
                          std::size_t bad = 0;
                          for (std::size_t j = 0; j < s.plane_count(); ++j) {
                              if (s.value(j, 0) != 1.0 || s.value(j, n - 1) != 0.0) ++bad;
                              for (std::size_t i = 0; i < n; ++i) {
                                  const double u = s.value(j, i);
                                  if (u > 1.0 || u < 1.0 - s.grid().z(i)) ++bad;
                              }
                          }
                          return std::pair{bad == 0, std::to_string(bad) + " violations"};
                      }});

    int failed = 0;
    for (const auto& c : checks) {
        std::pair<bool, std::string> r;
        try {
            r = c.body();
        } catch (const std::exception& e) {
            r = {false, e.what()};
        }
        if (!r.first) ++failed;
        out << (r.first ? "PASS " : "FAIL ") << c.name << " (" << r.second << ")\n";
    }
    out << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size()
        << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

// ---------------------------------------------------------------------------

double parse_period(const std::string& text) {
    if (text.empty()) throw ConfigError("empty period");
    std::size_t used = 0;
    double amount = 0.0;
    try {
        amount = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad period '" + text + "'");
    }
    const std::string unit = text.substr(used);
    if (!(amount > 0.0) || !std::isfinite(amount)) throw ConfigError("period must be positive");
    if (unit.empty() || unit == "y") return to_years(amount, TimeUnit::years);
    if (unit == "m") return to_years(amount, TimeUnit::months);
    if (unit == "w") return to_years(amount, TimeUnit::weeks);
    if (unit == "d") return to_years(amount, TimeUnit::days);
    throw ConfigError("bad period unit in '" + text + "' (use d, w, m or y)");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Growth-optimal investing with a periodically reset stop-loss."};
    app.set_config("--config", "", "Flat key=value file mirroring the flags; flags override it");
    app.require_subcommand(1, 1);
    app.fallthrough();

    double sharpe = 0.0;
    std::string period = "1m";
    std::string format;
    double dtheta = 0.0;
    double theta_max = 0.0;
    double var_cap = 0.0;
    auto* o_mu = app.add_option("--mu", cfg.market.mu, "Risky drift per year");
    app.add_option("--r", cfg.market.r, "Risk-free rate per year");
    app.add_option("--sigma", cfg.market.sigma, "Risky volatility per sqrt(year)");
    auto* o_sharpe = app.add_option("--sharpe", sharpe, "Sharpe ratio; sets mu = r + sharpe * sigma");
    app.add_option("--period", period, "Reset period: 30d, 2w, 1m, 1y");
    app.add_option("--stop-delta", cfg.stop_delta, "Stop distance: pi_c = 1 - delta");
    app.add_option("--nz", cfg.nz, "Interior z nodes");
    auto* o_dtheta = app.add_option("--dtheta", dtheta, "Scaled time step (default: stability limit)");
    auto* o_theta = app.add_option("--theta-max", theta_max, "Scaled horizon (default: period / tau)");
    app.add_option("--max-planes", cfg.max_planes, "Stored theta planes");
    app.add_option("--paths", cfg.paths, "Monte Carlo paths");
    app.add_option("--steps", cfg.steps, "Time steps per period");
    app.add_option("--seed", cfg.seed, "Random seed");
    auto* o_cap = app.add_option("--var-cap", var_cap, "Portfolio volatility cap sigma_max");
    app.add_option("--out", cfg.out, "Output path without extension");
    auto* o_format = app.add_option("--format", format, "csv or json")
                         ->check(CLI::IsMember({"csv", "json"}));

    auto* solve = app.add_subcommand("solve", "Solve the stop-loss strategy surface");
    std::string figure_id;
    auto* figure = app.add_subcommand("figure", "Plot-ready tables: 1a, 1b, 2a, 2b");
    figure->add_option("which", figure_id, "Figure id")->required();
    std::string strategy_name = "solved";
    bool path_summaries = false;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo growth of one strategy");
    sim->add_option("--strategy", strategy_name,
                    "none, kelly, terminal, solved, half, double, kappa=<x>");
    sim->add_flag("--path-summaries", path_summaries, "Also write <out>_paths.csv");
    std::vector<std::string> strategy_names;
    auto* cmp = app.add_subcommand("compare", "Rank strategies under common random numbers");
    cmp->add_option("--strategies", strategy_names, "Comma-separated strategy names")
        ->delimiter(',')
        ->required();
    auto* check = app.add_subcommand("check", "Residual checks against closed-form solutions");
    double rv_theta = 0.0;
    double rv_lo = 0.0;
    double rv_hi = 0.0;
    std::size_t rv_nodes = 2001;
    auto* rv = app.add_subcommand("reconstruct-value", "Value function from a solved slice");
    auto* o_rv_theta = rv->add_option("--theta", rv_theta, "Scaled time of the slice");
    auto* o_rv_lo = rv->add_option("--pi-lo", rv_lo, "Lowest portfolio value");
    auto* o_rv_hi = rv->add_option("--pi-hi", rv_hi, "Highest portfolio value");
    rv->add_option("--nodes", rv_nodes, "Log-uniform nodes");
    std::vector<double> excess;
    std::vector<double> cov;
    double fraction = 1.0;
    auto* ma = app.add_subcommand("multi-asset", "Kelly weights for several risky assets");
    ma->add_option("--excess", excess, "Excess drifts mu_k - r")->delimiter(',')->required();
    ma->add_option("--cov", cov, "Row-major covariance matrix")->delimiter(',')->required();
    ma->add_option("--u", fraction, "Fraction of the Kelly portfolio");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << '\n';
        return 2;
    }

    try {
        if (o_mu->count() > 0 && o_sharpe->count() > 0) {
            throw ConfigError("give either --mu or --sharpe, not both");
        }
        if (o_sharpe->count() > 0) cfg.market.mu = cfg.market.r + sharpe * cfg.market.sigma;
        cfg.period_years = parse_period(period);
        if (!(cfg.stop_delta > 0.0 && cfg.stop_delta < 1.0)) {
            throw ConfigError("stop-delta must lie in (0, 1)");
        }
        if (cfg.max_planes < 3) throw ConfigError("max-planes must be at least 3");
        if (o_dtheta->count() > 0) cfg.dtheta = dtheta;
        if (o_theta->count() > 0) {
            if (!(theta_max > 0.0)) throw ConfigError("theta-max must be positive");
            cfg.theta_max = theta_max;
        }
        if (o_cap->count() > 0) cfg.var_cap = var_cap;
        if (o_format->count() > 0) cfg.format = format == "csv" ? Format::csv : Format::json;

        if (solve->parsed()) return cmd_solve(cfg, out);
        if (figure->parsed()) return cmd_figure(cfg, figure_id, out);
        if (sim->parsed()) return cmd_simulate(cfg, strategy_name, path_summaries, out);
        if (cmp->parsed()) return cmd_compare(cfg, strategy_names, out);
        if (check->parsed()) return cmd_check(cfg, out);
        if (rv->parsed()) {
            const auto opt = [](const CLI::Option* o, double v) {
                return o->count() > 0 ? std::optional<double>(v) : std::nullopt;
            };
            return cmd_reconstruct(cfg, opt(o_rv_theta, rv_theta), opt(o_rv_lo, rv_lo),
                                   opt(o_rv_hi, rv_hi), rv_nodes, out);
        }
        if (ma->parsed()) return cmd_multi_asset(cfg, excess, cov, fraction, out);
        throw ConfigError("no subcommand");
    } catch (const ConfigError& e) {
        err << "error: config: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "error: domain: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "error: numerical: " << e.what() << '\n';
        return 3;
    } catch (const UnsupportedError& e) {
        err << "error: unsupported: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "error: io: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return 5;
    }
}

}  // namespace kellystop::cli
