#include "mrp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

constexpr double kPdRatio = 1e-10;
constexpr double kActiveTol = 1e-6;

Vector gather(const Vector& v, const IndexSet& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
  return out;
}

void check_restricted_vector(const ProblemInstance& inst, const Vector& x, const IndexSet& L) {
  if (static_cast<std::size_t>(x.size()) != inst.N())
    throw Error(ErrorKind::InvalidInput,
                fmt::format("vector has length {}, expected {}", x.size(), inst.N()));
  if (L.empty() || L.values().back() >= inst.N())
    throw Error(ErrorKind::InvalidInput, "index set is empty or out of range");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!L.contains(static_cast<std::size_t>(i)) && x[i] != 0.0)
      throw Error(ErrorKind::InvalidInput,
                  fmt::format("x has nonzero entry {} outside the index set", i));
}

}  // namespace

IndexSet::IndexSet(std::initializer_list<std::size_t> idx)
    : IndexSet(std::vector<std::size_t>(idx)) {}

IndexSet::IndexSet(std::vector<std::size_t> idx) : idx_(std::move(idx)) {
  std::sort(idx_.begin(), idx_.end());
  idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
}

IndexSet IndexSet::range(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return IndexSet(std::move(v));
}

bool IndexSet::contains(std::size_t i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

IndexSet IndexSet::united(const IndexSet& other) const {
  std::vector<std::size_t> out;
  std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                 std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet IndexSet::complement(std::size_t n) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!contains(i)) out.push_back(i);
  return IndexSet(std::move(out));
}

ProblemInstance::ProblemInstance(SymMatrix m, SymMatrix a, double phi, std::size_t k)
    : m_(std::move(m)), a_(std::move(a)), phi_(phi), k_(k), lambda_min_a_(0.0) {
  if (m_.order() != a_.order())
    throw Error(ErrorKind::InvalidInput, "M and A must have the same order");
  if (!(phi_ > 0.0) || !std::isfinite(phi_))
    throw Error(ErrorKind::InvalidInput, fmt::format("phi must be positive, got {}", phi_));
  if (k_ < 1 || k_ > m_.order())
    throw Error(ErrorKind::InvalidInput,
                fmt::format("sparsity budget k={} outside [1, {}]", k_, m_.order()));
  auto check_pd = [](const SymMatrix& s, const char* name) {
    const auto eig = eig_sym(s);
    const double lo = eig.values[0];
    const double hi = eig.values[eig.values.size() - 1];
    if (!(lo > 0.0) || !(lo > kPdRatio * hi))
      throw Error(ErrorKind::NotPositiveDefinite,
                  fmt::format("{} is not positive definite (eigenvalues {} .. {})", name, lo, hi));
    return lo;
  };
  check_pd(m_, "M");
  lambda_min_a_ = check_pd(a_, "A");
}

double objective(const ProblemInstance& inst, const Vector& x) {
  return x.dot(inst.M().matrix() * x);
}

bool support_feasible(const ProblemInstance& inst, const IndexSet& idx) {
  if (idx.empty()) throw Error(ErrorKind::InvalidIndexSet, "support_feasible: empty index set");
  if (idx.values().back() >= inst.N())
    throw Error(ErrorKind::InvalidIndexSet, "support_feasible: index out of range");
  const auto eig = eig_sym(SymMatrix(principal_submatrix(inst.A().matrix(), idx.values())));
  return eig.values[eig.values.size() - 1] >= inst.phi() * (1.0 - 1e-10);
}

KktCertificate kkt_residual(const ProblemInstance& inst, const Vector& x, const IndexSet& L) {
  check_restricted_vector(inst, x, L);
  const Vector mx = inst.M().matrix() * x;
  const Vector ax = inst.A().matrix() * x;
  const Vector g = gather(mx, L);
  const Vector a = gather(ax, L);
  const Vector u = gather(x, L);

  const bool inactive = x.dot(ax) > inst.phi() * (1.0 + 1e-8);
  const double uu = u.squaredNorm();
  if (uu == 0.0) throw Error(ErrorKind::InvalidInput, "kkt_residual: x_L is zero");

  // r = g - lambda a + mu u, least squares in (lambda, mu) with lambda >= 0.
  double lambda = 0.0;
  double mu = -u.dot(g) / uu;
  if (!inactive) {
    const double aa = a.squaredNorm();
    const double au = a.dot(u);
    const double det = aa * uu - au * au;
    if (det > 1e-10 * aa * uu) {
      // normal equations for columns (-a, u)
      const double r1 = a.dot(g);   // -(-a)^T g
      const double r2 = -u.dot(g);
      const double lam = (uu * r1 + au * r2) / det;
      const double m = (au * r1 + aa * r2) / det;
      if (lam > 0.0) {
        lambda = lam;
        mu = m;
      }
    }
  }

  KktCertificate cert;
  cert.lambda = lambda;
  cert.mu = mu;
  cert.w = -(mx - lambda * ax);
  for (std::size_t i : L) cert.w[static_cast<Eigen::Index>(i)] = 0.0;
  const Vector r = mx - lambda * ax + mu * x + cert.w;
  cert.residual = r.norm();
  return cert;
}

bool robinson_check(const ProblemInstance& inst, const Vector& x, const IndexSet& L) {
  check_restricted_vector(inst, x, L);
  const Vector ax = inst.A().matrix() * x;
  if (std::abs(x.dot(ax) - inst.phi()) > kActiveTol * inst.phi()) return true;
  const Vector a = gather(ax, L);
  const Vector u = gather(x, L);
  const double aa = a.squaredNorm();
  const double uu = u.squaredNorm();
  const double au = a.dot(u);
  return aa * uu - au * au > 1e-10 * aa * uu;
}

PortfolioSolution PortfolioSolution::make(const ProblemInstance& inst, Vector x,
                                          IndexSet support) {
  if (static_cast<std::size_t>(x.size()) != inst.N())
    throw Error(ErrorKind::InvalidSolution, "solution has the wrong dimension");
  if (support.size() != inst.k() || support.values().back() >= inst.N())
    throw Error(ErrorKind::InvalidSolution,
                fmt::format("support has size {}, expected {}", support.size(), inst.k()));
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0 && !support.contains(static_cast<std::size_t>(i)))
      throw Error(ErrorKind::InvalidSolution,
                  fmt::format("entry {} is nonzero but outside the support", i));
  const double norm = x.norm();
  if (std::abs(norm - 1.0) > 1e-8)
    throw Error(ErrorKind::InvalidSolution, fmt::format("solution norm {} is not 1", norm));
  const double var = x.dot(inst.A().matrix() * x);
  if (var < inst.phi() * (1.0 - 1e-8))
    throw Error(ErrorKind::InvalidSolution,
                fmt::format("variance {} is below the threshold {}", var, inst.phi()));

  PortfolioSolution s;
  s.objective_ = mrp::objective(inst, x);
  s.variance_ = var;
  s.kkt_ = mrp::kkt_residual(inst, x, support);
  s.active_ = std::abs(var - inst.phi()) <= kActiveTol * inst.phi();
  s.robinson_ = robinson_check(inst, x, support);
  s.x_ = std::move(x);
  s.support_ = std::move(support);
  return s;
}

}  // namespace mrp
