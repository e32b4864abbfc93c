#include "mrp/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <Eigen/QR>
#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

std::string iso_day(int offset) {
  using namespace std::chrono;
  const year_month_day d{sys_days{year{2020} / January / 1} + days{offset}};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

}  // namespace

Matrix random_orthogonal(Rng& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  const auto m = static_cast<Eigen::Index>(n);
  Matrix g(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) g(i, j) = nd(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < m; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Matrix random_spd(Rng& rng, std::size_t n, double cond) {
  if (n == 0 || !(cond >= 1.0)) throw Error(ErrorKind::InvalidInput, "random_spd: bad arguments");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(n);
  Vector d(m);
  for (Eigen::Index i = 0; i < m; ++i) d[i] = std::pow(cond, u(rng));
  d[0] = 1.0;
  if (m > 1) d[m - 1] = cond;
  const Matrix q = random_orthogonal(rng, n);
  Matrix s = q * d.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

ProblemInstance random_instance(Rng& rng, std::size_t n, std::size_t k, double cond) {
  Matrix M = random_spd(rng, n, cond);
  Matrix A = random_spd(rng, n, cond);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  const double phi = u(rng) * A.diagonal().maxCoeff();
  return ProblemInstance(SymMatrix(std::move(M)), SymMatrix(std::move(A)), phi, k);
}

ProblemInstance planted_block_instance(Rng& rng, std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw Error(ErrorKind::InvalidInput, "planted block needs 1 <= k <= n");
  std::uniform_real_distribution<double> small(0.01, 0.1);
  std::uniform_real_distribution<double> large(5.0, 10.0);
  const auto kk = static_cast<Eigen::Index>(k);
  const auto rest = static_cast<Eigen::Index>(n - k);
  Matrix M = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  {
    Vector d(kk);
    for (Eigen::Index i = 0; i < kk; ++i) d[i] = small(rng);
    const Matrix q = random_orthogonal(rng, k);
    M.topLeftCorner(kk, kk) = q * d.asDiagonal() * q.transpose();
  }
  if (rest > 0) {
    Vector d(rest);
    for (Eigen::Index i = 0; i < rest; ++i) d[i] = large(rng);
    const Matrix q = random_orthogonal(rng, n - k);
    M.bottomRightCorner(rest, rest) = q * d.asDiagonal() * q.transpose();
  }
  M = 0.5 * (M + M.transpose());
  return ProblemInstance(SymMatrix(std::move(M)),
                         SymMatrix::identity(n), 1.0, k);
}

PlantedData planted_prices(std::uint64_t seed, const PlantedConfig& cfg) {
  if (cfg.assets < 3 || cfg.periods < 3)
    throw Error(ErrorKind::InvalidInput, "planted data needs at least 3 assets and 3 periods");
  Rng rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> level(std::log(20.0), std::log(200.0));

  std::vector<std::size_t> order(cfg.assets);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t a = order[0], b = order[1], c = order[2];

  const auto T = static_cast<Eigen::Index>(cfg.periods);
  const auto N = static_cast<Eigen::Index>(cfg.assets);
  Matrix logp(T, N);
  Vector base(N);
  for (Eigen::Index j = 0; j < N; ++j) base[j] = level(rng);

  double r1 = 0.0, r2 = 0.0, u = 0.0;
  Vector walk = Vector::Zero(N);
  const double u_sd0 = cfg.spread_sd / std::sqrt(1.0 - cfg.spread_ar * cfg.spread_ar);
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t == 0) {
      u = u_sd0 * nd(rng);
    } else {
      r1 += cfg.walk_sd * nd(rng);
      r2 += cfg.walk_sd * nd(rng);
      u = cfg.spread_ar * u + cfg.spread_sd * nd(rng);
      for (Eigen::Index j = 0; j < N; ++j) walk[j] += cfg.walk_sd * nd(rng);
    }
    for (Eigen::Index j = 0; j < N; ++j) logp(t, j) = base[j] + walk[j];
    logp(t, static_cast<Eigen::Index>(a)) = base[a] + r1 + cfg.noise_sd * nd(rng);
    logp(t, static_cast<Eigen::Index>(b)) = base[b] + r2 + cfg.noise_sd * nd(rng);
    logp(t, static_cast<Eigen::Index>(c)) = base[c] + r1 + r2 + u;
  }

  PlantedData out;
  out.planted = IndexSet{a, b, c};
  out.prices.prices = logp.array().exp().matrix();
  for (std::size_t j = 0; j < cfg.assets; ++j) out.prices.tickers.push_back(fmt::format("A{:02d}", j));
  for (Eigen::Index t = 0; t < T; ++t) out.prices.dates.push_back(iso_day(static_cast<int>(t)));
  return out;
}

PriceMatrix market_prices(std::uint64_t seed, const MarketConfig& cfg) {
  if (cfg.assets == 0 || cfg.periods < 2)
    throw Error(ErrorKind::InvalidInput, "market data needs assets and at least 2 periods");
  Rng rng(seed);
  std::normal_distribution<double> nd;
  const auto N = static_cast<Eigen::Index>(cfg.assets);
  const auto F = static_cast<Eigen::Index>(cfg.factors);
  const auto T = static_cast<Eigen::Index>(cfg.periods);
  std::uniform_real_distribution<double> level(std::log(20.0), std::log(200.0));

  Matrix loadings(N, F);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index f = 0; f < F; ++f) loadings(i, f) = nd(rng);
  Vector base(N);
  for (Eigen::Index i = 0; i < N; ++i) base[i] = level(rng);

  Vector factor = Vector::Zero(F), walk = Vector::Zero(N), ar = Vector::Zero(N);
  Matrix logp(T, N);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index f = 0; f < F; ++f) factor[f] += cfg.factor_sd * nd(rng);
    for (Eigen::Index i = 0; i < N; ++i) {
      walk[i] += cfg.idio_sd * nd(rng);
      ar[i] = cfg.stationary_ar * ar[i] + cfg.stationary_sd * nd(rng);
    }
    logp.row(t) = (base + loadings * factor + walk + ar).transpose();
  }

  PriceMatrix p;
  p.prices = logp.array().exp().matrix();
  for (std::size_t j = 0; j < cfg.assets; ++j) p.tickers.push_back(fmt::format("A{:02d}", j));
  for (Eigen::Index t = 0; t < T; ++t) p.dates.push_back(iso_day(static_cast<int>(t)));
  return p;
}

}  // namespace mrp
