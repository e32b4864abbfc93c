#include "mrp/pd_stage.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "mrp/errors.hpp"
#include "mrp/subproblems.hpp"

namespace mrp {

namespace {

constexpr double kExhaustiveLimit = 200000.0;

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

double lambda_max_on(const ProblemInstance& inst, const IndexSet& idx) {
  const auto eig = eig_sym(SymMatrix(principal_submatrix(inst.A().matrix(), idx.values())));
  return eig.values[eig.values.size() - 1];
}

IndexSet pad_to(IndexSet s, std::size_t k, std::size_t n) {
  std::vector<std::size_t> v = s.values();
  for (std::size_t i = 0; i < n && v.size() < k; ++i)
    if (!s.contains(i)) v.push_back(i);
  return IndexSet(std::move(v));
}

double inf_norm(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

void check_start(const ProblemInstance& inst, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != inst.N())
    throw Error(ErrorKind::InvalidInput, "start vector has the wrong dimension");
  if (std::abs(y.norm() - 1.0) > 1e-8)
    throw Error(ErrorKind::InvalidInput, "start vector must have unit norm");
  const auto nnz = static_cast<std::size_t>((y.array() != 0.0).count());
  if (nnz > inst.k())
    throw Error(ErrorKind::InvalidInput,
                fmt::format("start vector has {} nonzeros, budget is {}", nnz, inst.k()));
}

}  // namespace

void PdConfig::validate() const {
  if (!(rho0 > 0.0)) throw Error(ErrorKind::InvalidInput, "rho0 must be positive");
  if (!(growth > 1.0)) throw Error(ErrorKind::InvalidInput, "penalty growth must exceed 1");
  if (!(inner_tol > 0.0) || !(outer_tol > 0.0))
    throw Error(ErrorKind::InvalidInput, "tolerances must be positive");
  if (max_inner < 1 || max_outer < 1)
    throw Error(ErrorKind::InvalidInput, "iteration limits must be at least 1");
}

PenaltyState bcd_solve(const ProblemInstance& inst, double rho, const Vector& y0,
                       const PdConfig& cfg) {
  check_start(inst, y0);
  PenaltyState st;
  st.rho = rho;
  st.y = y0;
  Vector x_prev;
  for (int s = 1; s <= cfg.max_inner; ++s) {
    const PxResult px = solve_px(inst.M(), inst.A(), rho, st.y, inst.phi());
    SparseProjection py = solve_py(px.x, inst.k());
    const double q = penalty_objective(inst.M(), rho, px.x, py.y);
    st.q_history.push_back(q);
    st.iterations = s;

    bool stop = false;
    if (s > 1) {
      const double dx = inf_norm(px.x - x_prev) / std::max(inf_norm(px.x), 1.0);
      const double dy = inf_norm(py.y - st.y) / std::max(inf_norm(py.y), 1.0);
      stop = std::max(dx, dy) <= cfg.inner_tol;
      if (q == st.q_history[st.q_history.size() - 2]) {
        st.stationary_q = true;
        stop = true;
      }
    }
    x_prev = px.x;
    st.x = px.x;
    st.y = std::move(py.y);
    if (stop) {
      st.converged = true;
      break;
    }
  }
  return st;
}

IndexSet find_feasible_support(const ProblemInstance& inst) {
  const std::size_t n = inst.N();
  const std::size_t k = inst.k();
  const Matrix& a = inst.A().matrix();

  if (lambda_max_on(inst, IndexSet::range(n)) < inst.phi() * (1.0 - 1e-10))
    throw Error(ErrorKind::Infeasible,
                "no portfolio reaches the volatility threshold: lambda_max(A) < phi");

  Eigen::Index best = 0;
  a.diagonal().maxCoeff(&best);
  IndexSet s{static_cast<std::size_t>(best)};
  if (a(best, best) >= inst.phi()) return pad_to(s, k, n);

  // greedy forward selection on lambda_max(A_SS)
  while (s.size() < k) {
    double top = -1.0;
    std::size_t pick = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (s.contains(j)) continue;
      const double l = lambda_max_on(inst, s.united(IndexSet{j}));
      if (l > top) {
        top = l;
        pick = j;
      }
    }
    s = s.united(IndexSet{pick});
    if (support_feasible(inst, s)) return pad_to(s, k, n);
  }

  if (binomial(n, k) <= kExhaustiveLimit) {
    std::vector<std::size_t> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = i;
    while (true) {
      IndexSet cand(c);
      if (support_feasible(inst, cand)) return cand;
      std::size_t i = k;
      while (i > 0 && c[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++c[i - 1];
      for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
    }
    throw Error(ErrorKind::Infeasible,
                fmt::format("no support of size {} reaches the volatility threshold", k));
  }
  throw Error(ErrorKind::Infeasible,
              fmt::format("no feasible support of size {} found by greedy search", k));
}

Vector default_start(const ProblemInstance& inst) {
  const Matrix& a = inst.A().matrix();
  Eigen::Index best = 0;
  a.diagonal().maxCoeff(&best);
  Vector y = Vector::Zero(a.rows());
  if (a(best, best) >= inst.phi()) {
    y[best] = 1.0;
    return y;
  }
  const IndexSet s = find_feasible_support(inst);
  const auto eig = eig_sym(SymMatrix(principal_submatrix(a, s.values())));
  const Vector top = eig.vectors.col(eig.vectors.cols() - 1);
  for (std::size_t i = 0; i < s.size(); ++i)
    y[static_cast<Eigen::Index>(s[i])] = top[static_cast<Eigen::Index>(i)];
  normalize_sign(y);
  return y;
}

IndexSet padded_support(const Vector& y, std::size_t k) {
  std::vector<std::size_t> v;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0) v.push_back(static_cast<std::size_t>(i));
  return pad_to(IndexSet(std::move(v)), k, static_cast<std::size_t>(y.size()));
}

PdResult pd_solve(const ProblemInstance& inst, const PdConfig& cfg,
                  const std::optional<Vector>& y00) {
  cfg.validate();
  const IndexSet searched = find_feasible_support(inst);
  Vector y = y00 ? *y00 : default_start(inst);
  check_start(inst, y);

  PdResult out;
  PdDiagnostics& diag = out.diagnostics;
  diag.x_norm_bound = std::max(std::sqrt(inst.phi() / inst.lambda_min_A()), 1.0);

  double rho = cfg.rho0;
  for (int j = 0; j < cfg.max_outer; ++j) {
    const PenaltyState st = bcd_solve(inst, rho, y, cfg);
    ++diag.outer_iterations;
    diag.total_inner += st.iterations;
    if (!st.converged) ++diag.nonconverged_inner;
    diag.max_x_norm = std::max(diag.max_x_norm, st.x.norm());
    const double gap = inf_norm(st.x - st.y);
    diag.xy_gap_history.push_back(gap);
    diag.q_histories.push_back(st.q_history);
    diag.final_xy_gap = gap;
    diag.final_rho = rho;
    y = st.y;
    if (gap <= cfg.outer_tol) {
      diag.outer_converged = true;
      break;
    }
    rho *= cfg.growth;
  }

  out.y_block = y;
  out.L = padded_support(y, inst.k());
  diag.y_block_objective = objective(inst, y);
  diag.y_block_variance = y.dot(inst.A().matrix() * y);
  diag.y_block_kkt_residual = kkt_residual(inst, y, out.L).residual;

  if (!support_feasible(inst, out.L)) {
    diag.support_fallback = true;
    out.L = searched;
  }
  const RestrictedSolution polished = solve_restricted(inst, out.L);
  out.x_star = polished.x;
  out.objective = polished.value;
  out.cert = polished.cert;
  const KktCertificate kkt = kkt_residual(inst, out.x_star, out.L);
  diag.kkt_residual = kkt.residual;
  diag.kkt_lambda = kkt.lambda;
  diag.kkt_mu = kkt.mu;
  diag.robinson = robinson_check(inst, out.x_star, out.L);
  return out;
}

}  // namespace mrp
