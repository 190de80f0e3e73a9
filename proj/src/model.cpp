#include "coxian/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "coxian/errors.hpp"
#include "coxian/linalg.hpp"

namespace coxian {

namespace {

// Fast2Sum fixpoint: replace mu by fl(fl(lambda+mu)-lambda) so the stored
// (diag, superdiag) pair reproduces mu bit-exactly on the way back.
double canonical_mu(double lambda, double mu) {
  for (int k = 0; k < 3; ++k) {
    double s = lambda + mu;
    double m2 = s - lambda;
    if (m2 == mu) break;
    mu = m2;
  }
  return mu;
}

[[noreturn]] void bad(const std::string& what) { throw validation_error(what); }

} // namespace

void validate(const CoxianParams& p) {
  const int n = p.order();
  if (n < 1) bad("params: phase count must be >= 1");
  if (static_cast<int>(p.lambda.size()) != n - 1)
    bad("params: lambda must have length n-1 = " + std::to_string(n - 1));
  for (int i = 0; i < n - 1; ++i) {
    if (!std::isfinite(p.lambda[i]) || p.lambda[i] <= 0.0)
      bad("params: lambda[" + std::to_string(i + 1) + "] must be finite and > 0");
    if (!std::isfinite(p.mu[i]) || p.mu[i] < 0.0)
      bad("params: mu[" + std::to_string(i + 1) + "] must be finite and >= 0");
  }
  if (!std::isfinite(p.mu[n - 1]) || p.mu[n - 1] <= 0.0)
    bad("params: mu[" + std::to_string(n) + "] must be finite and > 0");
}

CoxianParams make_params(std::vector<double> lambda, std::vector<double> mu) {
  if (mu.empty()) bad("params: mu must be nonempty");
  const int n = static_cast<int>(mu.size());
  if (static_cast<int>(lambda.size()) != n - 1)
    bad("params: lambda must have length n-1 = " + std::to_string(n - 1));
  for (int i = 0; i < n - 1; ++i) {
    if (mu[i] < 0.0 && mu[i] >= -kValiditySlack) mu[i] = 0.0;
    mu[i] = canonical_mu(lambda[i], mu[i]);
    if (mu[i] < 0.0 && mu[i] >= -kValiditySlack) mu[i] = 0.0;
  }
  CoxianParams p{std::move(lambda), std::move(mu)};
  validate(p);
  return p;
}

void validate(const Generator& g) {
  const int n = g.order();
  if (n < 1) bad("generator: order must be >= 1");
  if (static_cast<int>(g.superdiag.size()) != n - 1)
    bad("generator: superdiag must have length n-1 = " + std::to_string(n - 1));
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(g.diag[i]) || g.diag[i] >= 0.0)
      bad("generator: diag[" + std::to_string(i + 1) + "] must be finite and < 0");
  }
  for (int i = 0; i < n - 1; ++i) {
    if (!std::isfinite(g.superdiag[i]) || g.superdiag[i] <= 0.0)
      bad("generator: superdiag[" + std::to_string(i + 1) + "] must be finite and > 0");
    if (g.superdiag[i] > -g.diag[i])
      bad("generator: superdiag[" + std::to_string(i + 1) +
          "] exceeds -diag (implies negative absorption rate)");
  }
}

Generator make_generator(std::vector<double> diag, std::vector<double> superdiag) {
  const int n = static_cast<int>(diag.size());
  if (n >= 1 && static_cast<int>(superdiag.size()) == n - 1) {
    for (int i = 0; i < n - 1; ++i) {
      // absorb round-trip noise: mu within slack of zero snaps to the boundary
      if (superdiag[i] > -diag[i] && superdiag[i] <= -diag[i] + kValiditySlack)
        superdiag[i] = -diag[i];
    }
  }
  Generator g{std::move(diag), std::move(superdiag)};
  validate(g);
  return g;
}

Generator build_generator(const CoxianParams& p) {
  validate(p);
  const int n = p.order();
  Generator g;
  g.diag.resize(n);
  g.superdiag = p.lambda;
  for (int i = 0; i < n - 1; ++i) g.diag[i] = -(p.lambda[i] + p.mu[i]);
  g.diag[n - 1] = -p.mu[n - 1];
  return g;
}

CoxianParams params_from_generator(const Generator& g) {
  validate(g);
  const int n = g.order();
  CoxianParams p;
  p.lambda = g.superdiag;
  p.mu.resize(n);
  for (int i = 0; i < n - 1; ++i) {
    double m = -g.diag[i] - g.superdiag[i];
    if (m < 0.0) {
      if (m < -kValiditySlack)
        bad("generator: superdiag[" + std::to_string(i + 1) + "] exceeds -diag beyond tolerance");
      m = 0.0;
    }
    p.mu[i] = m;
  }
  p.mu[n - 1] = -g.diag[n - 1];
  return p;
}

AbsorbVector absorbing_vector(const Generator& g) {
  validate(g);
  const int n = g.order();
  AbsorbVector a;
  a.q.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = (i < n - 1) ? g.superdiag[i] : 0.0;
    double qi = -g.diag[i] - s;
    a.q[i] = (qi < 0.0) ? 0.0 : qi;
  }
  return a;
}

double moment(const Generator& g, int r) {
  validate(g);
  if (r < 1) bad("moment: order r must be >= 1");
  const int n = g.order();
  std::vector<double> v(n, 1.0);
  double factorial = 1.0;
  for (int k = 1; k <= r; ++k) {
    v = solve_neg(g, v);
    factorial *= k;
    if (!std::isfinite(factorial) || !std::isfinite(v[0]))
      throw numeric_error("moment: overflow at r = " + std::to_string(k));
  }
  double m = factorial * v[0];
  if (!std::isfinite(m)) throw numeric_error("moment: overflow");
  return m;
}

double density(const Generator& g, double t) {
  if (t < 0.0) bad("density: t must be >= 0");
  const AbsorbVector q = absorbing_vector(g);
  if (t == 0.0) return q.q[0];  // p q == mu_1, exact
  std::vector<double> w = expm_action(g, t, q.q);
  return w[0] > 0.0 ? w[0] : 0.0;
}

double survival(const Generator& g, double t) {
  if (t < 0.0) bad("survival: t must be >= 0");
  validate(g);
  if (t == 0.0) return 1.0;
  std::vector<double> ones(g.order(), 1.0);
  double s = expm_action(g, t, ones)[0];
  if (s < 0.0) return 0.0;
  return s > 1.0 ? 1.0 : s;
}

double laplace(const Generator& g, double s) {
  validate(g);
  if (!(s > 0.0)) bad("laplace: s must be > 0");
  const int n = g.order();
  const AbsorbVector q = absorbing_vector(g);
  // (sI - Q) is upper bidiagonal with diagonal s - diag[i] > 0 and
  // superdiagonal -superdiag[i]; back-substitute (sI - Q) x = q.
  std::vector<double> x(n);
  x[n - 1] = q.q[n - 1] / (s - g.diag[n - 1]);
  for (int i = n - 2; i >= 0; --i)
    x[i] = (q.q[i] + g.superdiag[i] * x[i + 1]) / (s - g.diag[i]);
  return x[0];
}

SummaryStats summary(const CoxianParams& p, int n_moments) {
  validate(p);
  if (n_moments < 1) bad("summary: number of moments must be >= 1");
  const int n = p.order();
  SummaryStats st;
  st.los.resize(n);
  st.exit_probs.resize(n);
  double reach = 1.0;  // probability the process reaches phase k
  for (int k = 0; k < n; ++k) {
    double lam = (k < n - 1) ? p.lambda[k] : 0.0;
    double total = lam + p.mu[k];
    st.los[k] = 1.0 / total;
    st.exit_probs[k] = reach * (p.mu[k] / total);
    reach *= lam / total;
  }
  const Generator g = build_generator(p);
  st.moments.resize(n_moments);
  for (int r = 1; r <= n_moments; ++r) st.moments[r - 1] = moment(g, r);
  return st;
}

DensityEvaluator::DensityEvaluator(const Generator& g) : gen_(g) {
  validate(g);
  const int n = g.order();
  const AbsorbVector q = absorbing_vector(g);
  mu1_ = q.q[0];

  // f(t) = sum_k coef_[k] e^{diag[k] t} when the diagonal entries are
  // separated; coefficients come from the first row of the closed form:
  //   E(t)[0][j] = (prod_{l<j} s_l) sum_{k<=j} e^{d_k t} / prod_{l<=j, l!=k}(d_k - d_l)
  double dmax = 0.0;
  for (double d : g.diag) dmax = std::max(dmax, std::abs(d));
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      min_gap = std::min(min_gap, std::abs(g.diag[i] - g.diag[j]));
  if (n > 1 && min_gap <= kEigSeparationTol * dmax) return;  // fallback path

  coef_.assign(n, 0.0);
  double prefix = 1.0;  // prod of superdiag below column j
  for (int j = 0; j < n; ++j) {
    if (j > 0) prefix *= g.superdiag[j - 1];
    for (int k = 0; k <= j; ++k) {
      double denom = 1.0;
      for (int l = 0; l <= j; ++l)
        if (l != k) denom *= g.diag[k] - g.diag[l];
      coef_[k] += q.q[j] * prefix / denom;
    }
  }
}

double DensityEvaluator::operator()(double t) const {
  if (t < 0.0) bad("density: t must be >= 0");
  if (t == 0.0) return mu1_;
  if (coef_.empty()) return density(gen_, t);
  double f = 0.0;
  for (size_t k = 0; k < coef_.size(); ++k) f += coef_[k] * std::exp(gen_.diag[k] * t);
  return f > 0.0 ? f : 0.0;
}

} // namespace coxian
