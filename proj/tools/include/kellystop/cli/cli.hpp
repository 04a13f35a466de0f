#pragma once

#include "kellystop/market.hpp"
#include "kellystop/simulate.hpp"
#include "kellystop/value_fn.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kellystop::cli {

/// Configuration problems detected before any work starts.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

/// Everything a subcommand needs, after defaults, config file and flags.
struct RunConfig {
    MarketParams market{0.10, 0.00, 0.10};
    double period_years = 1.0 / 12.0;
    double stop_delta = 0.05;           // pi_c = 1 - delta at the period start
    std::size_t nz = 200;
    std::optional<double> dtheta;       // default: stability limit
    std::optional<double> theta_max;    // default: period / tau
    std::size_t max_planes = 2001;
    std::size_t paths = 10000;
    std::size_t steps = 250;
    std::uint64_t seed = 1;
    std::optional<double> var_cap;      // sigma_max
    std::string out = "kellystop";      // output path without extension
    std::optional<Format> format;

    double stop_level() const { return 1.0 - stop_delta; }
};

/// "1m", "2w", "30d", "1y" (a bare number means years).
double parse_period(const std::string& text);

/// 17 significant digits, round-trip exact.
std::string format_number(double v);

/// Parse and execute one command line. Returns the process exit status;
/// errors are reported on `err` as a single line `error: <code>: <reason>`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Writers, exposed for tests.
void write_surface_csv(std::ostream& os, const StrategySurface& s);
void write_surface_json(std::ostream& os, const StrategySurface& s, const RunConfig& cfg,
                        const DerivedParams& dp);
void write_value_csv(std::ostream& os, const ValueCurve& c);
void write_sim_json(std::ostream& os, const SimResult& r, const std::string& strategy,
                    const RunConfig& cfg);

}  // namespace kellystop::cli
