#pragma once

// Seeded random instances and synthetic price data.

#include <cstddef>
#include <cstdint>
#include <random>

#include "mrp/estimation.hpp"
#include "mrp/model.hpp"

namespace mrp {

using Rng = std::mt19937_64;

/// Random rotation of log-uniform eigenvalues in [1, cond]; both ends are
/// attained, so the condition number is exactly cond (n >= 2).
Matrix random_spd(Rng& rng, std::size_t n, double cond);

/// Haar-distributed orthogonal matrix.
Matrix random_orthogonal(Rng& rng, std::size_t n);

/// Random M, A with the given condition bound and phi drawn from
/// [0.5, 1] * max_i A_ii, which keeps every instance feasible.
ProblemInstance random_instance(Rng& rng, std::size_t n, std::size_t k, double cond = 1e3);

/// M block-diagonal whose block on {0, ..., k-1} has much smaller
/// eigenvalues than the rest; A = I, phi = 1.
ProblemInstance planted_block_instance(Rng& rng, std::size_t n, std::size_t k);

struct PlantedConfig {
  std::size_t assets = 9;      // total assets; three of them carry the planted spread
  std::size_t periods = 500;
  double walk_sd = 0.01;       // daily log-return volatility of the random walks
  double spread_ar = 0.2;      // AR(1) coefficient of the planted spread
  double spread_sd = 0.1;      // innovation volatility of the planted spread
  double noise_sd = 0.005;     // idiosyncratic noise on the planted assets
};

struct PlantedData {
  PriceMatrix prices;
  IndexSet planted;  // the three cointegrated assets
};

/// Independent random walks plus three assets a, b, c with
///   log p_a = R1 + e_a,  log p_b = R2 + e_b,  log p_c = R1 + R2 + u,
/// where R1, R2 are latent random walks and u is a stationary AR(1) spread,
/// so only log p_c - log p_a - log p_b mean-reverts.
PlantedData planted_prices(std::uint64_t seed, const PlantedConfig& cfg = {});

struct MarketConfig {
  std::size_t assets = 12;
  std::size_t periods = 500;
  std::size_t factors = 3;
  double factor_sd = 0.01;      // daily volatility of the common random-walk factors
  double idio_sd = 0.003;       // idiosyncratic random-walk volatility
  double stationary_ar = 0.5;   // AR(1) coefficient of the idiosyncratic stationary part
  double stationary_sd = 0.005;
};

/// Factor-model log prices: Gaussian loadings on common random walks plus an
/// idiosyncratic random walk and an idiosyncratic AR(1) term per asset.
PriceMatrix market_prices(std::uint64_t seed, const MarketConfig& cfg = {});

}  // namespace mrp
