#include "coxian/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coxian/errors.hpp"

namespace coxian {

namespace {

double inf_norm(const Generator& g) {
  const int n = g.order();
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = std::abs(g.diag[i]);
    if (i < n - 1) row += g.superdiag[i];
    v = std::max(v, row);
  }
  return v;
}

struct TransformBuild {
  std::optional<Matrix> m;
  double terminal_residual = 0.0;  // relative to scale
};

// Rows 2..n from the difference equation
//   a_{i,i+1} m_{i+1,j} = m_{ij}(b_{jj} - a_{ii}) + m_{i,j-1} b_{j-1,j},
// each row rescaled to unit sum; the equation at i = n (where row n+1
// vanishes) is the consistency check that rejects non-equivalent spectra.
TransformBuild build_rows(const Generator& qa, const Generator& qb, double tol) {
  const int n = qa.order();
  const double scale = std::max(inf_norm(qa), inf_norm(qb));
  Matrix m(n);
  m(0, 0) = 1.0;
  for (int r = 0; r + 1 < n; ++r) {
    double sum = 0.0;
    for (int c = 0; c <= r + 1; ++c) {
      double v = m(r, c) * (qb.diag[c] - qa.diag[r]);
      if (c > 0) v += m(r, c - 1) * qb.superdiag[c - 1];
      v /= qa.superdiag[r];
      m(r + 1, c) = v;
      sum += v;
    }
    if (std::abs(sum) < 1e-12) return {std::nullopt, std::numeric_limits<double>::infinity()};
    for (int c = 0; c <= r + 1; ++c) m(r + 1, c) /= sum;
  }
  double resid = 0.0;
  for (int c = 0; c < n; ++c) {
    double v = m(n - 1, c) * (qb.diag[c] - qa.diag[n - 1]);
    if (c > 0) v += m(n - 1, c - 1) * qb.superdiag[c - 1];
    resid = std::max(resid, std::abs(v));
  }
  resid /= scale;
  if (resid > tol) return {std::nullopt, resid};
  return {m, resid};
}

} // namespace

double mu1(const Generator& g) {
  validate(g);
  double q1 = -g.diag[0] - (g.order() > 1 ? g.superdiag[0] : 0.0);
  return q1 < 0.0 ? 0.0 : q1;
}

std::optional<TransformMatrix> build_transform(const Generator& qa, const Generator& qb,
                                               double tol) {
  validate(qa);
  validate(qb);
  if (qa.order() != qb.order())
    throw dimension_error("build_transform: generators must have the same order");
  TransformBuild tb = build_rows(qa, qb, tol);
  if (!tb.m) return std::nullopt;
  return TransformMatrix{*std::move(tb.m)};
}

EquivalenceReport check_equivalent(const Generator& qa, const Generator& qb, double tol) {
  validate(qa);
  validate(qb);
  if (qa.order() != qb.order())
    throw dimension_error("check_equivalent: generators must have the same order");
  const int n = qa.order();
  const double scale = std::max(inf_norm(qa), inf_norm(qb));

  EquivalenceReport rep;
  rep.mu1_gap = std::abs(mu1(qa) - mu1(qb));

  TransformBuild tb = build_rows(qa, qb, tol);
  if (!tb.m) {
    rep.max_residual = tb.terminal_residual;
    rep.reason = "transform recurrence failed terminal consistency";
    return rep;
  }
  const Matrix& m = *tb.m;
  rep.m = TransformMatrix{m};

  // residual of the similarity equation M Qb = Qa M
  double resid = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double mqb = m(i, j) * qb.diag[j];
      if (j > 0) mqb += m(i, j - 1) * qb.superdiag[j - 1];
      double qam = qa.diag[i] * m(i, j);
      if (i < n - 1) qam += qa.superdiag[i] * m(i + 1, j);
      resid = std::max(resid, std::abs(mqb - qam));
    }
  }
  rep.max_residual = resid / scale;

  // condition (c): M qb = qa
  const AbsorbVector va = absorbing_vector(qa);
  const AbsorbVector vb = absorbing_vector(qb);
  double cgap = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += m(i, j) * vb.q[j];
    cgap = std::max(cgap, std::abs(s - va.q[i]));
  }

  // unit row sums
  double rowgap = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += m(i, j);
    rowgap = std::max(rowgap, std::abs(s - 1.0));
  }

  // first 2n-1 raw moments
  rep.moment_gaps.resize(2 * n - 1);
  double mgap = 0.0;
  for (int r = 1; r <= 2 * n - 1; ++r) {
    double ma = moment(qa, r);
    double mb = moment(qb, r);
    rep.moment_gaps[r - 1] = std::abs(ma - mb) / std::abs(ma);
    mgap = std::max(mgap, rep.moment_gaps[r - 1]);
  }

  if (rep.max_residual > tol)
    rep.reason = "similarity residual exceeds tolerance";
  else if (cgap > tol * scale)
    rep.reason = "absorbing-vector condition M qb = qa violated";
  else if (rowgap > 1e-10)
    rep.reason = "transform rows do not sum to one";
  else if (mgap > tol)
    rep.reason = "moment agreement failed";
  else if (rep.mu1_gap > tol)
    rep.reason = "first absorption rates differ";
  else
    rep.equivalent = true;
  return rep;
}

} // namespace coxian
