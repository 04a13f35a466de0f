#pragma once

#include "kellystop/market.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace kellystop {

/// Several risky assets: excess drifts mu_k - r and covariance
/// C_kl = sigma_k sigma_l rho_kl (row-major, n x n).
struct MultiAssetParams {
    std::vector<double> excess;
    std::vector<double> covariance;

    std::size_t size() const noexcept { return excess.size(); }

    /// Build C from volatilities and a row-major correlation matrix.
    static MultiAssetParams from_correlation(std::vector<double> excess,
                                             std::span<const double> vols,
                                             std::span<const double> correlation);
};

/// alpha_K = C^{-1} (mu - r) via Cholesky. DomainError unless C is symmetric
/// positive definite.
std::vector<double> kelly_weights(const MultiAssetParams& mp);

struct KellyPortfolioStats {
    double mu_kelly = 0.0;     // excess drift of the Kelly portfolio
    double sigma_kelly = 0.0;  // its volatility
    double variance_kelly = 0.0;  // sigma_kelly^2, identical to mu_kelly
    std::vector<double> weights;
};

/// mu_K = sigma_K^2 = (mu - r)^T C^{-1} (mu - r).
KellyPortfolioStats kelly_portfolio_stats(const MultiAssetParams& mp);

/// The Kelly portfolio as a single risky asset over risk-free rate `r`.
/// Its free Kelly fraction is 1.
MarketParams kelly_portfolio_market(const KellyPortfolioStats& stats, double r);

/// u * alpha_K elementwise.
std::vector<double> scale_to_multi(double u, std::span<const double> weights);

}  // namespace kellystop
