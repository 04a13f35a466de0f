#include "kellystop/simulate.hpp"

#include "kellystop/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>

namespace kellystop {

const char* const kRngAlgorithm =
    "mt19937_64 per 1024-path block, block seed splitmix64(seed + 0x9e3779b97f4a7c15*(block+1)), "
    "std::normal_distribution";

namespace {

constexpr std::size_t kBlockPaths = 1024;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t block_seed(std::uint64_t seed, std::size_t block) {
    return splitmix64(seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(block) + 1));
}

void validate(const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw DomainError("n_paths must be at least 1");
    if (cfg.n_steps < 1) throw DomainError("n_steps must be at least 1");
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
        throw DomainError("period length must be positive");
    }
    if (!(cfg.stop_level >= 0.0 && cfg.stop_level < 1.0)) {
        throw DomainError("stop level must satisfy 0 <= pi_c < pi_0 = 1");
    }
}

// Policy interface: alpha(pi, t, m) and floor(m) (-inf when unconstrained).
template <class Policy>
SimResult run_paths(const SimConfig& cfg, const DerivedParams& dp, const Policy& policy) {
    validate(cfg);
    const std::size_t n = cfg.n_paths;
    const std::size_t blocks = (n + kBlockPaths - 1) / kBlockPaths;
    const double dt = cfg.horizon / static_cast<double>(cfg.n_steps);
    const double sqdt = std::sqrt(dt);
    const double excess = dp.excess;
    const double sigma = dp.market.sigma;
    const double var = sigma * sigma;
    const double stop = cfg.stop_level;
    const double log_stop = stop > 0.0 ? std::log(stop) : 0.0;

    std::vector<PathSummary> summaries(n);

    auto run_block = [&](std::size_t block) {
        std::mt19937_64 gen(block_seed(cfg.seed, block));
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t begin = block * kBlockPaths;
        const std::size_t end = std::min(n, begin + kBlockPaths);
        for (std::size_t path = begin; path < end; ++path) {
            PathSummary s;
            double log_pi = 0.0;
            double pi = 1.0;
            double high = 1.0;
            for (std::size_t k = 0; k < cfg.n_steps; ++k) {
                const double xi = normal(gen);
                if (s.stopped) continue;
                const double t = static_cast<double>(k) * dt;
                const double a = policy.alpha(pi, t, high);
                if (!std::isfinite(a) || std::abs(a) > cfg.max_abs_alpha) {
                    throw NumericalError("strategy returned alpha = " + std::to_string(a) +
                                         " on path " + std::to_string(path) + " at step " +
                                         std::to_string(k) + " (pi = " + std::to_string(pi) +
                                         ", t = " + std::to_string(t) + ")");
                }
                log_pi += (a * excess - 0.5 * a * a * var) * dt + a * sigma * sqdt * xi;
                pi = std::exp(log_pi);
                if (stop > 0.0 && pi <= stop) {
                    pi = stop;
                    log_pi = log_stop;
                    s.stopped = true;
                    s.stop_time = static_cast<double>(k + 1) * dt;
                }
                high = std::max(high, pi);
                s.max_drawdown = std::max(s.max_drawdown, 1.0 - pi / high);
                s.max_violation = std::max(s.max_violation, (policy.floor(high) - pi) / high);
            }
            s.log_terminal = log_pi;
            summaries[path] = s;
        }
    };

    std::size_t workers = cfg.threads == 0 ? default_worker_count() : cfg.threads;
    workers = std::clamp<std::size_t>(workers, 1, blocks);
    if (workers == 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                try {
                    for (std::size_t b = next++; b < blocks; b = next++) run_block(b);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = blocks;
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    SimResult res;
    res.n_paths = n;
    res.n_steps = cfg.n_steps;
    res.seed = cfg.seed;
    res.rng = kRngAlgorithm;
    res.terminal_log.resize(n);
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const PathSummary& s = summaries[i];
        res.terminal_log[i] = s.log_terminal;
        sum += s.log_terminal;
        hits += s.stopped ? 1 : 0;
        res.max_constraint_violation = std::max(res.max_constraint_violation, s.max_violation);
        res.max_drawdown = std::max(res.max_drawdown, s.max_drawdown);
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : res.terminal_log) ss += (v - mean) * (v - mean);
    res.mean_log_growth = mean;
    res.std_error =
        n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    res.stop_hit_rate = static_cast<double>(hits) / static_cast<double>(n);
    if (cfg.keep_paths) res.paths = std::move(summaries);
    return res;
}

struct FunctionPolicy {
    const StrategyFn& fn;
    double alpha(double pi, double t, double) const { return fn(pi, t); }
    double floor(double) const { return -std::numeric_limits<double>::infinity(); }
};

struct DrawdownPolicy {
    double alpha_kelly;
    double lambda;
    double alpha(double pi, double, double high) const {
        const double floor_level = lambda * high;
        if (pi <= floor_level) return 0.0;
        return alpha_kelly * (1.0 - floor_level / pi);
    }
    double floor(double high) const { return lambda * high; }
};

}  // namespace

std::size_t default_worker_count() {
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("KELLYSTOP_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
    }
    return n;
}

SimResult simulate(const SimConfig& cfg, const DerivedParams& dp, const StrategyFn& strategy) {
    if (!strategy) throw DomainError("no strategy supplied");
    return run_paths(cfg, dp, FunctionPolicy{strategy});
}

double paired_std_error(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw DomainError("paired samples must match in size");
    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    if (n < 2) return 0.0;
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

Comparison compare_strategies(const SimConfig& cfg, const DerivedParams& dp,
                              std::span<const NamedStrategy> strategies) {
    if (strategies.size() < 2) throw DomainError("comparison needs at least two strategies");
    std::vector<SimResult> results;
    results.reserve(strategies.size());
    for (const auto& s : strategies) results.push_back(simulate(cfg, dp, s.fn));

    const std::size_t m = results.size();
    Comparison cmp;
    cmp.pairwise_std_error.assign(m, std::vector<double>(m, 0.0));
    cmp.pairwise_difference.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            cmp.pairwise_difference[i][j] = results[i].mean_log_growth - results[j].mean_log_growth;
            cmp.pairwise_std_error[i][j] =
                paired_std_error(results[i].terminal_log, results[j].terminal_log);
        }
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return results[a].mean_log_growth > results[b].mean_log_growth;
    });
    const std::size_t best = order.front();
    for (std::size_t idx : order) {
        RankedResult r;
        r.name = strategies[idx].name;
        r.gap_to_best = results[best].mean_log_growth - results[idx].mean_log_growth;
        r.gap_std_error = cmp.pairwise_std_error[best][idx];
        r.result = results[idx];
        cmp.ranked.push_back(std::move(r));
    }
    return cmp;
}

SimResult simulate_drawdown(const SimConfig& cfg, const DerivedParams& dp, double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("drawdown fraction must lie in [0, 1)");
    SimConfig c = cfg;
    c.stop_level = 0.0;
    return run_paths(c, dp, DrawdownPolicy{dp.alpha_kelly, lambda});
}

StrategyFn constant_strategy(double alpha) {
    return [alpha](double, double) { return alpha; };
}

StrategyFn analytic_strategy(AnalyticStrategy s, const DerivedParams& dp, double horizon) {
    return [s = std::move(s), dp, horizon](double pi, double t) {
        return eval_strategy(s, StrategyState{pi, t}, dp, horizon);
    };
}

StrategyFn surface_strategy(const StrategySurface& surface, const DerivedParams& dp,
                            double stop_level, double horizon, double kappa,
                            std::optional<double> sigma_max) {
    if (!(stop_level > 0.0)) throw DomainError("surface strategy needs a positive stop level");
    if (horizon / dp.tau > surface.grid().theta_max() * (1.0 + 1e-9)) {
        throw DomainError("surface does not cover the period: T/tau = " +
                          std::to_string(horizon / dp.tau) + " > theta_max = " +
                          std::to_string(surface.grid().theta_max()));
    }
    if (!std::isfinite(kappa)) throw DomainError("scale factor must be finite");
    const double cap = sigma_max ? apply_var_cap(std::numeric_limits<double>::infinity(),
                                                 *sigma_max, dp.sharpe)
                                 : std::numeric_limits<double>::infinity();
    auto shared = std::make_shared<const StrategySurface>(surface);
    const double ak = dp.alpha_kelly;
    const double tau = dp.tau;
    return [shared, ak, tau, stop_level, horizon, kappa, cap](double pi, double t) {
        const double u = shared->at_clamped(stop_level / pi, (horizon - t) / tau);
        return ak * std::min(kappa * u, cap);
    };
}

double apply_var_cap(double u, double sigma_max, double sharpe) {
    if (!(sigma_max > 0.0)) throw DomainError("volatility cap must be positive");
    if (!(sharpe > 0.0)) throw DomainError("VaR cap needs a positive Sharpe ratio");
    return std::min(u, sigma_max / sharpe);
}

}  // namespace kellystop
