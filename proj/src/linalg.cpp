#include "coxian/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coxian/errors.hpp"

namespace coxian {

Matrix Matrix::identity(int order) {
  Matrix m(order);
  for (int i = 0; i < order; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

// C = A * B for upper-triangular A, B; entries below the diagonal stay 0.
Matrix mul_upper(const Matrix& a, const Matrix& b) {
  const int n = a.n;
  Matrix c(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = i; k <= j; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

double max_abs(const Matrix& m) {
  double v = 0.0;
  for (double x : m.a) v = std::max(v, std::abs(x));
  return v;
}

} // namespace

std::vector<double> solve_neg(const Generator& g, std::span<const double> rhs) {
  BidiagonalSolveWorkspace ws;
  solve_neg(g, rhs, ws);
  return std::move(ws.x);
}

void solve_neg(const Generator& g, std::span<const double> rhs, BidiagonalSolveWorkspace& ws) {
  const int n = g.order();
  if (static_cast<int>(rhs.size()) != n)
    throw dimension_error("solve_neg: rhs length must equal the generator order");
  for (int i = 0; i < n; ++i)
    if (std::abs(g.diag[i]) < 1e-300)
      throw numeric_error("solve_neg: singular diagonal at index " + std::to_string(i + 1));
  ws.x.resize(n);
  // (-Q) has positive diagonal -diag[i] and negative superdiagonal; back
  // substitution from the last row.
  ws.x[n - 1] = rhs[n - 1] / -g.diag[n - 1];
  for (int i = n - 2; i >= 0; --i)
    ws.x[i] = (rhs[i] + g.superdiag[i] * ws.x[i + 1]) / -g.diag[i];
}

std::optional<Matrix> expm_closed_form(const Generator& g, double t) {
  validate(g);
  if (t < 0.0) throw validation_error("expm: t must be >= 0");
  const int n = g.order();
  double dmax = 0.0;
  for (double d : g.diag) dmax = std::max(dmax, std::abs(d));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(g.diag[i] - g.diag[j]) <= kEigSeparationTol * dmax) return std::nullopt;

  Matrix e(n);
  std::vector<double> expd(n);
  for (int i = 0; i < n; ++i) expd[i] = std::exp(g.diag[i] * t);
  for (int i = 0; i < n; ++i) {
    e(i, i) = expd[i];
    double prefix = 1.0;
    for (int j = i + 1; j < n; ++j) {
      prefix *= g.superdiag[j - 1];
      // divided difference of e^{x t} over nodes diag[i..j]
      double s = 0.0;
      for (int k = i; k <= j; ++k) {
        double denom = 1.0;
        for (int l = i; l <= j; ++l)
          if (l != k) denom *= g.diag[k] - g.diag[l];
        s += expd[k] / denom;
      }
      e(i, j) = prefix * s;
    }
  }
  return e;
}

Matrix expm_series(const Generator& g, double t) {
  validate(g);
  if (t < 0.0) throw validation_error("expm: t must be >= 0");
  const int n = g.order();
  if (t == 0.0) return Matrix::identity(n);

  // Shift by the largest diagonal entry so the scaled matrix has nonpositive
  // diagonal with at least one zero; restores as a scalar factor.
  const double alpha = *std::max_element(g.diag.begin(), g.diag.end());
  Matrix b(n);
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    b(i, i) = (g.diag[i] - alpha) * t;
    double row = std::abs(b(i, i));
    if (i < n - 1) {
      b(i, i + 1) = g.superdiag[i] * t;
      row += b(i, i + 1);
    }
    norm = std::max(norm, row);
  }

  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const double inv = std::ldexp(1.0, -squarings);
    for (double& x : b.a) x *= inv;
  }

  Matrix result = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 40; ++k) {
    term = mul_upper(term, b);
    const double inv_k = 1.0 / k;
    for (size_t idx = 0; idx < term.a.size(); ++idx) {
      term.a[idx] *= inv_k;
      result.a[idx] += term.a[idx];
    }
    if (max_abs(term) <= std::numeric_limits<double>::epsilon() * max_abs(result)) break;
  }
  for (int s = 0; s < squarings; ++s) result = mul_upper(result, result);

  const double factor = std::exp(alpha * t);
  for (double& x : result.a) x *= factor;
  return result;
}

Matrix expm(const Generator& g, double t) {
  if (auto closed = expm_closed_form(g, t)) return *std::move(closed);
  return expm_series(g, t);
}

std::vector<double> expm_action(const Generator& g, double t, std::span<const double> v) {
  const int n = g.order();
  if (static_cast<int>(v.size()) != n)
    throw dimension_error("expm_action: vector length must equal the generator order");
  if (t == 0.0) return std::vector<double>(v.begin(), v.end());
  const Matrix e = expm(g, t);
  std::vector<double> w(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) w[i] += e(i, j) * v[j];
  return w;
}

std::vector<double> expm_action_row(const Generator& g, double t, std::span<const double> v) {
  const int n = g.order();
  if (static_cast<int>(v.size()) != n)
    throw dimension_error("expm_action: vector length must equal the generator order");
  if (t == 0.0) return std::vector<double>(v.begin(), v.end());
  const Matrix e = expm(g, t);
  std::vector<double> w(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) w[j] += v[i] * e(i, j);
  return w;
}

} // namespace coxian
