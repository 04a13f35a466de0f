#include <doctest.h>

#include "kellystop/error.hpp"
#include "kellystop/market.hpp"

#include <cmath>
#include <random>

using namespace kellystop;

TEST_CASE("derive_params: unit Sharpe, 10% vol") {
    const auto d = derive_params({0.10, 0.00, 0.10});
    CHECK(d.alpha_kelly == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(d.sharpe == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.tau == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("derive_params: Sharpe 0.2 gives alpha_K = 1, tau = 50y") {
    const auto d = derive_params({0.06, 0.02, 0.20});
    CHECK(d.alpha_kelly == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.sharpe == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(d.tau == doctest::Approx(50.0).epsilon(1e-13));
}

TEST_CASE("derive_params rejects degenerate inputs") {
    CHECK_THROWS_AS(derive_params({0.05, 0.05, 0.2}), DomainError);
    CHECK_THROWS_AS(derive_params({0.10, 0.00, 0.0}), DomainError);
    CHECK_THROWS_AS(derive_params({0.10, 0.00, -0.1}), DomainError);
}

TEST_CASE("negative risk premium is allowed in core") {
    const auto d = derive_params({0.01, 0.03, 0.2});
    CHECK(d.alpha_kelly < 0.0);
    CHECK(d.tau > 0.0);
}

TEST_CASE("changing time units leaves alpha_K fixed and rescales tau") {
    const MarketParams yearly{0.08, 0.02, 0.15};
    const MarketParams monthly{yearly.mu / 12.0, yearly.r / 12.0, yearly.sigma / std::sqrt(12.0)};
    const auto a = derive_params(yearly);
    const auto b = derive_params(monthly);
    CHECK(b.alpha_kelly == doctest::Approx(a.alpha_kelly).epsilon(1e-13));
    CHECK(b.tau == doctest::Approx(12.0 * a.tau).epsilon(1e-13));
}

TEST_CASE("to_scaled examples") {
    const auto d = derive_params({0.10, 0.00, 0.10});  // tau = 2
    const double pc = 0.9;
    const double T = 1.0;
    auto st = to_scaled(pc, T, pc, T, d);
    CHECK(st.z == 1.0);
    CHECK(st.theta == 0.0);

    st = to_scaled(2.0 * pc, 0.0, pc, d.tau, d);
    CHECK(st.z == doctest::Approx(0.5));
    CHECK(st.theta == doctest::Approx(1.0));

    // One month to go with s = 1: theta = 1/24.
    st = to_scaled(1.0, T - 1.0 / 12.0, pc, T, d);
    CHECK(st.theta == doctest::Approx(1.0 / 24.0).epsilon(1e-12));

    CHECK_THROWS_AS(to_scaled(0.0, 0.0, pc, T, d), DomainError);
    CHECK_THROWS_AS(to_scaled(-1.0, 0.0, pc, T, d), DomainError);
}

TEST_CASE("from_scaled inverts to_scaled") {
    const auto d = derive_params({0.10, 0.00, 0.10});
    auto ps = from_scaled({1.0, 0.0}, 0.95, 1.0, d);
    CHECK(ps.pi == 0.95);
    CHECK(ps.t == 1.0);
    ps = from_scaled({0.5, 1.0}, 0.95, 3.0, d);
    CHECK(ps.pi == doctest::Approx(1.9));
    CHECK(ps.t == doctest::Approx(1.0));
    CHECK_THROWS_AS(from_scaled({0.0, 1.0}, 0.95, 1.0, d), DomainError);

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double pc = 0.5 + 0.4 * unit(gen);
        const double T = 0.1 + 3.0 * unit(gen);
        const double pi = pc * (1.0 + 5.0 * unit(gen));
        const double t = T * unit(gen);
        const auto back = from_scaled(to_scaled(pi, t, pc, T, d), pc, T, d);
        CHECK(back.pi == doctest::Approx(pi).epsilon(1e-15));
        CHECK(std::abs(back.t - t) <= 4e-16 * std::max(1.0, T));
    }
}

TEST_CASE("time unit conversion") {
    CHECK(to_years(1.0, TimeUnit::months) == doctest::Approx(1.0 / 12.0));
    CHECK(to_years(1.0, TimeUnit::weeks) == doctest::Approx(7.0 / 365.0));
    CHECK(to_years(30.0, TimeUnit::days) == doctest::Approx(30.0 / 365.0));
    CHECK(to_years(2.0, TimeUnit::years) == 2.0);
}

TEST_CASE("grid stability gate") {
    // dz = 1/11, ratio = 0.1 * 121 = 12.1.
    CHECK_THROWS_AS(Grid(10, 0.1, 10), DomainError);
    const double dz = 1.0 / 11.0;
    CHECK_NOTHROW(Grid(10, 0.5 * dz * dz, 10));
    CHECK_THROWS_AS(Grid(10, 0.5000001 * dz * dz, 10), DomainError);

    const Grid g = Grid::for_horizon(200, 1.0 / 24.0);
    CHECK(g.theta_max() == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
    CHECK(g.stability_ratio() <= 0.5);
    CHECK(g.dz() == doctest::Approx(1.0 / 201.0));
}

TEST_CASE("surface interpolation reproduces nodes and rejects out-of-range queries") {
    const Grid g(4, 0.01, 4);
    std::vector<double> values;
    const std::size_t planes = StrategySurface::planes_for(g, 2);
    CHECK(planes == 3);
    for (std::size_t j = 0; j < planes; ++j) {
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            values.push_back(1.0 - g.z(i) + 0.1 * static_cast<double>(j) * g.z(i) * (1 - g.z(i)));
        }
        values.back() = 0.0;
    }
    const StrategySurface s(g, 2, values, ProblemKind::generic);
    CHECK(s.plane_theta(2) == doctest::Approx(0.04));
    CHECK(s.at(g.z(2), 0.02) == doctest::Approx(s.value(1, 2)));
    const double mid = 0.5 * (s.value(0, 1) + s.value(0, 2));
    CHECK(s.at(0.5 * (g.z(1) + g.z(2)), 0.0) == doctest::Approx(mid));
    CHECK_THROWS_AS(s.at(1.2, 0.0), DomainError);
    CHECK_THROWS_AS(s.at(0.5, 0.5), DomainError);
    CHECK(s.at_clamped(-1.0, 0.0) == doctest::Approx(1.0));

    std::vector<double> bad = values;
    bad[3] = std::nan("");
    CHECK_THROWS_AS(StrategySurface(g, 2, bad, ProblemKind::generic), NumericalError);
    std::vector<double> outside = values;
    outside[2] = 1.5;
    CHECK_THROWS_AS(StrategySurface(g, 2, outside, ProblemKind::stop_loss), DomainError);
}
