#include "mrp/restricted_qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

constexpr double kUnboundedLimit = 1e12;
constexpr double kBracketWidth = 1e-10;
constexpr int kMaxBisection = 200;
constexpr double kTraceTol = 1e-12;
constexpr double kEigenspaceTol = 1e-10;

double quad(const SymMatrix& q, const Vector& v) { return v.dot(q.matrix() * v); }

// Two-term combination t a a^T + (1 - t) b b^T with Tr(Q1 Y) = -1, where
// a^T Q1 a <= -1 <= b^T Q1 b.
std::optional<PsdSolution> bracketing_pair(const SymMatrix& Q1, const Vector& a,
                                           const Vector& b) {
  const double qa = quad(Q1, a);
  const double qb = quad(Q1, b);
  if (std::abs(qa + 1.0) <= kTraceTol) return PsdSolution::from_factor(a);
  if (std::abs(qb + 1.0) <= kTraceTol) return PsdSolution::from_factor(b);
  if (!(qa < -1.0 && qb > -1.0)) return std::nullopt;
  const double t = (-1.0 - qb) / (qa - qb);
  Matrix v(a.size(), 2);
  v.col(0) = std::sqrt(t) * a;
  v.col(1) = std::sqrt(1.0 - t) * b;
  return PsdSolution::from_factor(std::move(v));
}

// Unit u in span{a, b} with u^T Q1 u = -1, given a^T Q1 a <= -1 <= b^T Q1 b.
std::optional<Vector> rank_one_in_span(const SymMatrix& Q1, const Vector& a, const Vector& b) {
  const Vector e0 = a.normalized();
  Vector e1 = b - b.dot(e0) * e0;
  if (e1.norm() <= 1e-14 * b.norm()) return std::nullopt;
  e1.normalize();
  Matrix basis(a.size(), 2);
  basis << e0, e1;
  const auto g = eig_sym(SymMatrix(Matrix(basis.transpose() * Q1.matrix() * basis)));
  const double lo = g.values[0], hi = g.values[1];
  if (!(lo <= -1.0 && hi >= -1.0) || hi - lo <= 0.0) return std::nullopt;
  const double t = (-1.0 - hi) / (lo - hi);
  Vector u = basis * (std::sqrt(t) * g.vectors.col(0) + std::sqrt(1.0 - t) * g.vectors.col(1));
  u.normalize();
  return u;
}

// Null vector of the 2 x m system rows, taking the first free column of a
// column-pivoted reduced row echelon form.
Vector first_null_direction(Matrix rows) {
  const Eigen::Index m = rows.cols();
  std::vector<Eigen::Index> pivot_cols;
  Eigen::Index pr = 0;
  const double scale = std::max(rows.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index c = 0; c < m && pr < rows.rows(); ++c) {
    Eigen::Index best = pr;
    for (Eigen::Index r = pr + 1; r < rows.rows(); ++r)
      if (std::abs(rows(r, c)) > std::abs(rows(best, c))) best = r;
    if (std::abs(rows(best, c)) <= 1e-12 * scale) continue;
    rows.row(pr).swap(rows.row(best));
    rows.row(pr) /= rows(pr, c);
    for (Eigen::Index r = 0; r < rows.rows(); ++r)
      if (r != pr) rows.row(r) -= rows(r, c) * rows.row(pr);
    pivot_cols.push_back(c);
    ++pr;
  }
  Eigen::Index free_col = 0;
  while (std::find(pivot_cols.begin(), pivot_cols.end(), free_col) != pivot_cols.end()) ++free_col;
  Vector delta = Vector::Zero(m);
  delta[free_col] = 1.0;
  for (std::size_t i = 0; i < pivot_cols.size(); ++i)
    delta[pivot_cols[i]] = -rows(static_cast<Eigen::Index>(i), free_col);
  return delta;
}

}  // namespace

ReducedPair make_reduced_pair(SymMatrix Q0, SymMatrix Q1) {
  if (Q0.order() != Q1.order())
    throw Error(ErrorKind::InvalidInput, "reduced pair: Q0 and Q1 differ in order");
  const auto e0 = eig_sym(Q0);
  const auto e1 = eig_sym(Q1);
  if (!(e0.values[0] > 0.0))
    throw Error(ErrorKind::InvalidInput, "reduced pair: Q0 must be positive definite");
  if (!(e1.values[e1.values.size() - 1] < 0.0))
    throw Error(ErrorKind::InvalidInput, "reduced pair: Q1 must be negative definite");
  return ReducedPair{std::move(Q0), std::move(Q1)};
}

ReducedPair reduce(const ProblemInstance& inst, const IndexSet& idx) {
  if (!support_feasible(inst, idx))
    throw Error(ErrorKind::Infeasible,
                fmt::format("support of size {} cannot reach the volatility threshold", idx.size()));
  const Matrix a = principal_submatrix(inst.A().matrix(), idx.values());
  return make_reduced_pair(SymMatrix(principal_submatrix(inst.M().matrix(), idx.values())),
                           SymMatrix(Matrix(-a / inst.phi())));
}

DualEvaluation evaluate_dual(const ReducedPair& q, double y1) {
  const auto eig = eig_sym(SymMatrix(Matrix(q.Q0.matrix() - y1 * q.Q1.matrix())));
  DualEvaluation out;
  out.lambda_min = eig.values[0];
  out.v = eig.vectors.col(0);
  out.value = -y1 + out.lambda_min;
  out.supergradient = -1.0 - quad(q.Q1, out.v);
  return out;
}

DualCertificate dual_maximize(const ReducedPair& q, DualForm form) {
  DualCertificate cert;
  double lo = -1.0;
  double hi = 1.0;
  DualEvaluation e_hi;
  if (form == DualForm::Inequality) {
    hi = 0.0;
    e_hi = evaluate_dual(q, hi);
    if (e_hi.supergradient >= 0.0) {
      // h is non-decreasing on y1 <= 0, so the optimum sits at y1 = 0.
      cert.y1 = cert.y1_lo = cert.y1_hi = 0.0;
      cert.y2 = e_hi.lambda_min;
      cert.dual_value = e_hi.value;
      cert.active = false;
      cert.v_lo = cert.v_hi = e_hi.v;
      return cert;
    }
  } else {
    e_hi = evaluate_dual(q, hi);
    while (e_hi.supergradient > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > kUnboundedLimit)
        throw Error(ErrorKind::DualUnbounded,
                    "dual unbounded above: Tr(Q1 Y) = -1 is unattainable with Tr(Y) = 1");
      e_hi = evaluate_dual(q, hi);
    }
  }
  DualEvaluation e_lo = evaluate_dual(q, lo);
  while (e_lo.supergradient < 0.0) {
    hi = lo;
    e_hi = e_lo;
    lo *= 2.0;
    if (-lo > kUnboundedLimit)
      throw Error(ErrorKind::DualUnbounded,
                  "dual unbounded: no unit vector reaches Tr(Q1 Y) <= -1");
    e_lo = evaluate_dual(q, lo);
  }

  int it = 0;
  while (hi - lo > kBracketWidth * std::max({1.0, std::abs(lo), std::abs(hi)}) &&
         it < kMaxBisection) {
    ++it;
    const double mid = 0.5 * (lo + hi);
    DualEvaluation e = evaluate_dual(q, mid);
    if (e.supergradient > 0.0) {
      lo = mid;
      e_lo = std::move(e);
    } else if (e.supergradient < 0.0) {
      hi = mid;
      e_hi = std::move(e);
    } else {
      lo = hi = mid;
      e_lo = e;
      e_hi = std::move(e);
    }
  }

  const DualEvaluation e_mid = evaluate_dual(q, 0.5 * (lo + hi));
  const DualEvaluation* best = &e_mid;
  double y1 = 0.5 * (lo + hi);
  if (e_lo.value > best->value) { best = &e_lo; y1 = lo; }
  if (e_hi.value > best->value) { best = &e_hi; y1 = hi; }

  cert.y1 = y1;
  cert.y2 = best->lambda_min;
  cert.dual_value = -cert.y1 + cert.y2;
  cert.active = true;
  cert.y1_lo = lo;
  cert.y1_hi = hi;
  cert.v_lo = e_lo.v;
  cert.v_hi = e_hi.v;
  cert.iterations = it;
  return cert;
}

PsdSolution PsdSolution::from_factor(Matrix v) {
  PsdSolution out;
  out.Y = SymMatrix(Matrix(v * v.transpose()));
  out.rank = static_cast<std::size_t>(v.cols());
  out.factor = std::move(v);
  return out;
}

PsdSolution PsdSolution::from_matrix(const SymMatrix& y) {
  const auto eig = eig_sym(y);
  const double top = eig.values[eig.values.size() - 1];
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j)
    if (eig.values[j] > 1e-12 * top) keep.push_back(j);
  Matrix v(eig.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    v.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(keep[c]) * std::sqrt(eig.values[keep[c]]);
  PsdSolution out;
  out.Y = y;
  out.factor = std::move(v);
  out.rank = keep.size();
  return out;
}

PsdSolution recover_primal(const ReducedPair& q, const DualCertificate& cert, double null_tol) {
  const auto n = static_cast<Eigen::Index>(q.Q0.order());
  const Matrix z =
      q.Q0.matrix() - cert.y1 * q.Q1.matrix() - cert.y2 * Matrix::Identity(n, n);
  const auto eig = eig_sym(SymMatrix(z));
  const double scale = q.Q0.max_abs() + std::abs(cert.y1) * q.Q1.max_abs() + std::abs(cert.y2);
  Eigen::Index d = 0;
  while (d < n && eig.values[d] <= null_tol * scale) ++d;
  if (d == 0) d = 1;  // the smallest eigenvalue of Z is zero by construction of y2
  const Matrix basis = eig.vectors.leftCols(d);

  // Candidate directions inside the face, ordered by their Q1 value.
  const auto face = eig_sym(SymMatrix(Matrix(basis.transpose() * q.Q1.matrix() * basis)));
  const Matrix dirs = basis * face.vectors;

  if (!cert.active) {
    // Inequality form with slack: any face vector with v^T Q1 v <= -1.
    if (face.values[0] <= -1.0 + kTraceTol) return PsdSolution::from_factor(Vector(dirs.col(0)));
  } else {
    for (Eigen::Index j = 0; j < d; ++j)
      if (std::abs(face.values[j] + 1.0) <= kTraceTol)
        return PsdSolution::from_factor(Vector(dirs.col(j)));
    if (d >= 2) {
      if (auto y = bracketing_pair(q.Q1, dirs.col(0), dirs.col(d - 1))) return *y;
    }
  }
  // Fall back to the eigenvectors at the ends of the dual bracket, which
  // straddle the trace constraint by construction.
  if (cert.v_lo.size() == n && cert.v_hi.size() == n) {
    if (auto u = rank_one_in_span(q.Q1, cert.v_lo, cert.v_hi);
        u && std::abs(quad(q.Q1, *u) + 1.0) <= kTraceTol)
      return PsdSolution::from_factor(*u);
    if (auto y = bracketing_pair(q.Q1, cert.v_lo, cert.v_hi)) return *y;
    if (!cert.active && quad(q.Q1, cert.v_lo) <= -1.0) return PsdSolution::from_factor(cert.v_lo);
  }
  throw DegenerateFace(
      fmt::format("no pair of near-null vectors brackets Tr(Q1 Y) = -1 (face dimension {})", d),
      basis);
}

PsdSolution rank_reduce(const PsdSolution& y, const SymMatrix& Q1) {
  Matrix v = y.factor.cols() > 0 ? y.factor : PsdSolution::from_matrix(y.Y).factor;
  if (v.cols() <= 1) return y;

  while (v.cols() > 1) {
    const Eigen::Index r = v.cols();
    const Matrix g_trace = v.transpose() * v;
    const Matrix g_q1 = v.transpose() * Q1.matrix() * v;
    const Eigen::Index m = r * (r + 1) / 2;

    // Symmetric basis: diagonal entries first, then upper off-diagonals row-major.
    Matrix rows(2, m);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < r; ++i, ++col) {
      rows(0, col) = g_trace(i, i);
      rows(1, col) = g_q1(i, i);
    }
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = i + 1; j < r; ++j, ++col) {
        rows(0, col) = 2.0 * g_trace(i, j);
        rows(1, col) = 2.0 * g_q1(i, j);
      }
    Vector delta = first_null_direction(rows);
    normalize_sign(delta);

    Matrix dm = Matrix::Zero(r, r);
    col = 0;
    for (Eigen::Index i = 0; i < r; ++i, ++col) dm(i, i) = delta[col];
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = i + 1; j < r; ++j, ++col) dm(i, j) = dm(j, i) = delta[col];

    const auto eig_delta = eig_sym(SymMatrix(dm));
    const double lmax = eig_delta.values[r - 1];
    const Matrix w = Matrix::Identity(r, r) - dm / lmax;
    const auto eig_w = eig_sym(SymMatrix(w));
    const double wmax = eig_w.values[r - 1];

    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < r; ++j)
      if (eig_w.values[j] > 1e-12 * wmax) keep.push_back(j);
    if (static_cast<Eigen::Index>(keep.size()) == r) keep.erase(keep.begin());

    Matrix next(v.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
      next.col(static_cast<Eigen::Index>(c)) =
          v * eig_w.vectors.col(keep[c]) * std::sqrt(eig_w.values[keep[c]]);
    v = std::move(next);
  }
  return PsdSolution::from_factor(std::move(v));
}

ReducedSolution solve_reduced(const ReducedPair& q) {
  const auto e0 = eig_sym(q.Q0);
  const double lmin = e0.values[0];
  const Eigen::Index n = e0.values.size();

  // Minimum eigenvector of Q0 (or a vector of its eigenspace) if feasible.
  Eigen::Index mult = 1;
  while (mult < n && e0.values[mult] - lmin <= kEigenspaceTol * std::max(1.0, std::abs(lmin)))
    ++mult;
  std::optional<Vector> shortcut;
  for (Eigen::Index j = 0; j < mult && !shortcut; ++j)
    if (quad(q.Q1, e0.vectors.col(j)) <= -1.0) shortcut = e0.vectors.col(j);
  if (!shortcut && mult > 1) {
    const Matrix basis = e0.vectors.leftCols(mult);
    const auto face = eig_sym(SymMatrix(Matrix(basis.transpose() * q.Q1.matrix() * basis)));
    if (face.values[0] <= -1.0) {
      Vector v = basis * face.vectors.col(0);
      v /= v.norm();
      shortcut = v;
    }
  }

  ReducedSolution out;
  if (shortcut) {
    Vector v = *shortcut;
    normalize_sign(v);
    out.upsilon = v;
    out.value = quad(q.Q0, v);
    out.eigen_shortcut = true;
    out.cert.y1 = 0.0;
    out.cert.y2 = lmin;
    out.cert.dual_value = lmin;
    out.cert.active = std::abs(quad(q.Q1, v) + 1.0) <= 1e-10;
    out.cert.gap = std::abs(out.value - lmin);
    return out;
  }

  DualCertificate cert;
  try {
    cert = dual_maximize(q, DualForm::Equality);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DualUnbounded)
      throw Error(ErrorKind::Infeasible, fmt::format("restricted problem infeasible: {}", e.what()));
    throw;
  }

  PsdSolution y;
  try {
    y = recover_primal(q, cert);
  } catch (const DegenerateFace&) {
    y = recover_primal(q, cert, 10.0 * 1e-7);
  }
  const PsdSolution one = rank_reduce(y, q.Q1);
  Vector u = one.factor.col(0);
  u /= u.norm();
  normalize_sign(u);

  out.upsilon = u;
  out.value = quad(q.Q0, u);
  cert.gap = std::abs(out.value - cert.dual_value);
  out.cert = cert;
  return out;
}

RestrictedSolution solve_restricted(const ProblemInstance& inst, const IndexSet& idx) {
  const ReducedPair q = reduce(inst, idx);
  ReducedSolution r = solve_reduced(q);
  RestrictedSolution out;
  out.x = Vector::Zero(static_cast<Eigen::Index>(inst.N()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.x[static_cast<Eigen::Index>(idx[i])] = r.upsilon[static_cast<Eigen::Index>(i)];
  out.support = idx;
  out.value = objective(inst, out.x);
  out.cert = r.cert;
  out.eigen_shortcut = r.eigen_shortcut;
  return out;
}

}  // namespace mrp
