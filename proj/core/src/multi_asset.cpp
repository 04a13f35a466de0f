#include "kellystop/multi_asset.hpp"

#include "kellystop/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace kellystop {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::LLT<Matrix> factorize(const MultiAssetParams& mp) {
    const std::size_t n = mp.size();
    if (n == 0) throw DomainError("at least one risky asset is required");
    if (mp.covariance.size() != n * n) throw DomainError("covariance must be n x n");
    const auto idx = [n](std::size_t i, std::size_t j) { return i * n + j; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = mp.covariance[idx(i, j)];
            const double b = mp.covariance[idx(j, i)];
            if (std::abs(a - b) > 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300})) {
                throw DomainError("covariance matrix is not symmetric");
            }
        }
    }
    const Eigen::Map<const Matrix> c(mp.covariance.data(), static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(n));
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success) {
        throw DomainError("covariance matrix is not positive definite");
    }
    // LLT only reads one triangle; also insist on strictly positive pivots.
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) > 0.0)) throw DomainError("covariance matrix is not positive definite");
    }
    return llt;
}

}  // namespace

MultiAssetParams MultiAssetParams::from_correlation(std::vector<double> excess,
                                                    std::span<const double> vols,
                                                    std::span<const double> correlation) {
    const std::size_t n = excess.size();
    if (vols.size() != n || correlation.size() != n * n) {
        throw DomainError("volatility and correlation sizes do not match the asset count");
    }
    MultiAssetParams mp;
    mp.excess = std::move(excess);
    mp.covariance.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            mp.covariance[i * n + j] = vols[i] * vols[j] * correlation[i * n + j];
        }
    }
    return mp;
}

std::vector<double> kelly_weights(const MultiAssetParams& mp) {
    const auto llt = factorize(mp);
    const auto n = static_cast<Eigen::Index>(mp.size());
    const Eigen::Map<const Eigen::VectorXd> e(mp.excess.data(), n);
    const Eigen::VectorXd w = llt.solve(e);
    return {w.data(), w.data() + n};
}

KellyPortfolioStats kelly_portfolio_stats(const MultiAssetParams& mp) {
    KellyPortfolioStats st;
    st.weights = kelly_weights(mp);
    double q = 0.0;
    for (std::size_t i = 0; i < mp.size(); ++i) q += mp.excess[i] * st.weights[i];
    st.mu_kelly = q;
    st.variance_kelly = q;
    st.sigma_kelly = std::sqrt(q);
    return st;
}

MarketParams kelly_portfolio_market(const KellyPortfolioStats& stats, double r) {
    return {r + stats.mu_kelly, r, stats.sigma_kelly};
}

std::vector<double> scale_to_multi(double u, std::span<const double> weights) {
    if (!std::isfinite(u)) throw DomainError("scale factor must be finite");
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) out[i] = u * weights[i];
    return out;
}

}  // namespace kellystop
