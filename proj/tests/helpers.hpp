#pragma once

#include <doctest.h>

#include "mrp/errors.hpp"
#include "mrp/numerics.hpp"
#include "mrp/synthetic.hpp"

// Checks that `expr` throws mrp::Error with the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                                   \
  do {                                                                          \
    bool thrown_ = false;                                                       \
    try {                                                                       \
      (void)(expr);                                                             \
    } catch (const mrp::Error& e_) {                                            \
      thrown_ = true;                                                           \
      CHECK_MESSAGE(e_.kind() == (expected_kind), "got ", mrp::to_string(e_.kind())); \
    }                                                                           \
    CHECK_MESSAGE(thrown_, "expected ", mrp::to_string(expected_kind));         \
  } while (false)

namespace test {

inline mrp::Vector vec(std::initializer_list<double> v) {
  mrp::Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline mrp::SymMatrix diag(std::initializer_list<double> v) { return mrp::SymMatrix::diagonal(vec(v)); }

inline mrp::Matrix random_symmetric(mrp::Rng& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  const auto m = static_cast<Eigen::Index>(n);
  mrp::Matrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = nd(rng);
  return 0.5 * (g + g.transpose());
}

inline mrp::Vector random_vector(mrp::Rng& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  mrp::Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(rng);
  return v;
}

}  // namespace test
