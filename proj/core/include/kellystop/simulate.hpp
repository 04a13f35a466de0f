#pragma once

#include "kellystop/analytic.hpp"
#include "kellystop/market.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kellystop {

/// Fraction of discounted wealth in the risky asset as a function of
/// (pi, t); must be safe to call concurrently.
using StrategyFn = std::function<double(double, double)>;

struct SimConfig {
    std::size_t n_paths = 10000;
    std::size_t n_steps = 250;
    std::uint64_t seed = 1;
    double horizon = 1.0 / 12.0;  // period length T in years
    double stop_level = 0.0;      // pi_c; 0 disables the stop. pi_0 = 1.
    std::size_t threads = 0;      // 0: default_worker_count()
    bool keep_paths = false;      // fill SimResult::paths
    double max_abs_alpha = 1e6;   // |alpha| above this aborts the run
};

struct PathSummary {
    double log_terminal = 0.0;
    bool stopped = false;
    double stop_time = 0.0;       // first step end with pi <= pi_c
    double max_drawdown = 0.0;    // max over step ends of 1 - pi / m
    double max_violation = 0.0;   // drawdown runs: max over step ends of (lambda m - pi) / m
};

struct SimResult {
    double mean_log_growth = 0.0;  // estimate of E[log pi_T], nats per period
    double std_error = 0.0;
    double stop_hit_rate = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::string rng;
    /// Drawdown runs: worst (lambda m - pi) / m over all paths and step ends.
    double max_constraint_violation = 0.0;
    /// Worst realised drawdown 1 - pi / m over all paths.
    double max_drawdown = 0.0;
    std::vector<double> terminal_log;  // log pi_T per path
    std::vector<PathSummary> paths;    // only with keep_paths
};

/// Name of the random stream construction recorded in SimResult::rng.
extern const char* const kRngAlgorithm;

/// Worker count: hardware concurrency, capped by KELLYSTOP_THREADS when set.
std::size_t default_worker_count();

/// Simulate the controlled discounted wealth d pi / pi = alpha [(mu - r) dt
/// + sigma dW] from pi_0 = 1. Alpha is frozen over each step and pi advances
/// by the exact lognormal factor; a path ending a step at or below the stop
/// is absorbed at pi_c. Every path consumes n_steps normals whether or not it
/// is absorbed, so equal seeds give common random numbers across strategies.
/// Paths are split into fixed blocks with independent streams, so results do
/// not depend on the worker count.
SimResult simulate(const SimConfig& cfg, const DerivedParams& dp, const StrategyFn& strategy);

struct NamedStrategy {
    std::string name;
    StrategyFn fn;
};

struct RankedResult {
    std::string name;
    SimResult result;
    double gap_to_best = 0.0;     // best mean - this mean
    double gap_std_error = 0.0;   // paired standard error of that gap
};

struct Comparison {
    std::vector<RankedResult> ranked;  // best first
    /// Paired (common random number) standard errors of mean differences,
    /// indexed in input order.
    std::vector<std::vector<double>> pairwise_std_error;
    std::vector<std::vector<double>> pairwise_difference;  // mean_i - mean_j
};

/// Paired standard error of mean(a - b).
double paired_std_error(std::span<const double> a, std::span<const double> b);

Comparison compare_strategies(const SimConfig& cfg, const DerivedParams& dp,
                              std::span<const NamedStrategy> strategies);

/// Free Kelly with a trailing floor at lambda times the running maximum:
/// alpha = alpha_K (1 - lambda m / pi). Ignores cfg.stop_level. Reports the
/// worst discrete overshoot below the floor in max_constraint_violation.
SimResult simulate_drawdown(const SimConfig& cfg, const DerivedParams& dp, double lambda);

/// Constant fraction.
StrategyFn constant_strategy(double alpha);

/// Closed-form strategy over one period of length `horizon`.
StrategyFn analytic_strategy(AnalyticStrategy s, const DerivedParams& dp, double horizon);

/// alpha = alpha_K * min(kappa * u(pi_c / pi, (T - t) / tau), cap) with u read
/// by bilinear interpolation; z beyond the grid clamps to its edges. `cap`
/// is sigma_max / sharpe when `sigma_max` is given.
StrategyFn surface_strategy(const StrategySurface& surface, const DerivedParams& dp,
                            double stop_level, double horizon, double kappa = 1.0,
                            std::optional<double> sigma_max = std::nullopt);

/// min(u, sigma_max / sharpe).
double apply_var_cap(double u, double sigma_max, double sharpe);

}  // namespace kellystop
