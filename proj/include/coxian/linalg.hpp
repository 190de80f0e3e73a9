#ifndef COXIAN_LINALG_HPP
#define COXIAN_LINALG_HPP

#include <optional>
#include <span>
#include <vector>

#include "coxian/model.hpp"

namespace coxian {

// Small dense row-major square matrix; exp(Qt) of an upper-bidiagonal Q is
// upper triangular and the entries below the diagonal stay exactly zero.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int order) : n(order), a(static_cast<size_t>(order) * order, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  static Matrix identity(int order);
};

// Reusable scratch buffer for back-substitution chains.
struct BidiagonalSolveWorkspace {
  std::vector<double> x;
};

// Solve (-Q) x = rhs by back-substitution from the last row upward.
// Throws numeric_error when a diagonal entry is effectively zero.
std::vector<double> solve_neg(const Generator& g, std::span<const double> rhs);
void solve_neg(const Generator& g, std::span<const double> rhs, BidiagonalSolveWorkspace& ws);

// Relative separation of the closest diagonal pair; below this multiple of
// max|diag| the closed form is numerically unsafe and we fall back.
inline constexpr double kEigSeparationTol = 1e-8;

// Mixture-of-exponentials closed form for exp(Qt), valid when all diagonal
// entries are pairwise distinct: entry (i,j) is a divided-difference
// combination of e^{diag[k] t}. Returns nullopt when eigenvalues are too
// close (relative gap below kEigSeparationTol).
std::optional<Matrix> expm_closed_form(const Generator& g, double t);

// Scaling-and-squaring with a truncated series on the shifted triangular
// matrix; always available.
Matrix expm_series(const Generator& g, double t);

// exp(Qt) choosing between the closed form and the series automatically.
Matrix expm(const Generator& g, double t);

// Column action w = exp(Qt) v.
std::vector<double> expm_action(const Generator& g, double t, std::span<const double> v);
// Row action w = v exp(Qt).
std::vector<double> expm_action_row(const Generator& g, double t, std::span<const double> v);

} // namespace coxian

#endif
