#include "coxian/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>

#include "coxian/errors.hpp"
#include "coxian/linalg.hpp"
#include "coxian/rng.hpp"

namespace coxian {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// offset so interior absorption rates can reach zero in log coordinates
constexpr double kMuOffset = 1e-10;

double clamp_exp(double x) { return std::exp(std::clamp(x, -700.0, 700.0)); }

// Unconstrained coordinates: log lambda_i, log(mu_i + offset) for interior
// phases, log mu_n. Dimension 2n-1.
std::vector<double> encode(const CoxianParams& p) {
  const int n = p.order();
  std::vector<double> x(2 * n - 1);
  for (int i = 0; i < n - 1; ++i) x[i] = std::log(p.lambda[i]);
  for (int i = 0; i < n - 1; ++i) x[n - 1 + i] = std::log(p.mu[i] + kMuOffset);
  x[2 * n - 2] = std::log(p.mu[n - 1]);
  return x;
}

CoxianParams decode(int n, std::span<const double> x) {
  std::vector<double> lambda(n - 1), mu(n);
  for (int i = 0; i < n - 1; ++i) lambda[i] = clamp_exp(x[i]);
  for (int i = 0; i < n - 1; ++i) mu[i] = std::max(0.0, clamp_exp(x[n - 1 + i]) - kMuOffset);
  mu[n - 1] = clamp_exp(x[2 * n - 2]);
  return make_params(std::move(lambda), std::move(mu));
}

double neg_loglik_at(int n, std::span<const double> x, std::span<const double> data) {
  double ll = loglik(decode(n, x), data);
  if (!std::isfinite(ll)) return kInf;
  return -ll;
}

struct SimplexOutcome {
  std::vector<double> x;
  double f = kInf;
  bool converged = false;
  int iterations = 0;
};

// Nelder-Mead with the standard coefficients: reflection 1, expansion 2,
// contraction 0.5, shrink 0.5.
SimplexOutcome nelder_mead(const std::function<double(std::span<const double>)>& f,
                           const std::vector<double>& x0, double step, double f_tol,
                           double x_tol, long max_evals) {
  const int d = static_cast<int>(x0.size());
  std::vector<std::vector<double>> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  long evals = 0;
  for (int i = 1; i <= d; ++i) xs[i][i - 1] += step;
  for (int i = 0; i <= d; ++i) {
    fs[i] = f(xs[i]);
    ++evals;
  }

  auto order = [&] {
    std::vector<int> idx(d + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<std::vector<double>> xs2(d + 1);
    std::vector<double> fs2(d + 1);
    for (int i = 0; i <= d; ++i) {
      xs2[i] = std::move(xs[idx[i]]);
      fs2[i] = fs[idx[i]];
    }
    xs = std::move(xs2);
    fs = std::move(fs2);
  };

  SimplexOutcome out;
  order();
  if (!std::isfinite(fs[0])) {  // nowhere finite to start from
    out.x = xs[0];
    out.f = fs[0];
    return out;
  }

  std::vector<double> centroid(d), xr(d), xe(d), xc(d);
  while (evals < max_evals) {
    double f_spread = fs[d] - fs[0];
    double x_spread = 0.0;
    for (int i = 1; i <= d; ++i)
      for (int j = 0; j < d; ++j) x_spread = std::max(x_spread, std::abs(xs[i][j] - xs[0][j]));
    if (std::isfinite(f_spread) && f_spread < f_tol && x_spread < x_tol) {
      out.converged = true;
      break;
    }

    ++out.iterations;
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += xs[i][j];
      centroid[j] = s / d;
    }
    for (int j = 0; j < d; ++j) xr[j] = centroid[j] + (centroid[j] - xs[d][j]);
    double fr = f(xr);
    ++evals;

    if (fr < fs[0]) {
      for (int j = 0; j < d; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - xs[d][j]);
      double fe = f(xe);
      ++evals;
      if (fe < fr) {
        xs[d] = xe;
        fs[d] = fe;
      } else {
        xs[d] = xr;
        fs[d] = fr;
      }
    } else if (fr < fs[d - 1]) {
      xs[d] = xr;
      fs[d] = fr;
    } else {
      bool outside = fr < fs[d];
      if (outside) {
        for (int j = 0; j < d; ++j) xc[j] = centroid[j] + 0.5 * (xr[j] - centroid[j]);
      } else {
        for (int j = 0; j < d; ++j) xc[j] = centroid[j] - 0.5 * (centroid[j] - xs[d][j]);
      }
      double fc = f(xc);
      ++evals;
      if ((outside && fc <= fr) || (!outside && fc < fs[d])) {
        xs[d] = xc;
        fs[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          for (int j = 0; j < d; ++j) xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
          fs[i] = f(xs[i]);
          ++evals;
        }
      }
    }
    order();
  }
  out.x = xs[0];
  out.f = fs[0];
  return out;
}

// Cholesky-based inverse of a symmetric matrix; empty result when not PD.
std::vector<double> chol_inverse(std::vector<double> a, int d) {
  std::vector<double> l(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<size_t>(i) * d + j];
      for (int k = 0; k < j; ++k)
        s -= l[static_cast<size_t>(i) * d + k] * l[static_cast<size_t>(j) * d + k];
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) return {};
        l[static_cast<size_t>(i) * d + i] = std::sqrt(s);
      } else {
        l[static_cast<size_t>(i) * d + j] = s / l[static_cast<size_t>(j) * d + j];
      }
    }
  }
  // invert L, then H^{-1} = L^{-T} L^{-1}
  std::vector<double> li(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    li[static_cast<size_t>(i) * d + i] = 1.0 / l[static_cast<size_t>(i) * d + i];
    for (int j = 0; j < i; ++j) {
      double s = 0.0;
      for (int k = j; k < i; ++k)
        s += l[static_cast<size_t>(i) * d + k] * li[static_cast<size_t>(k) * d + j];
      li[static_cast<size_t>(i) * d + j] = -s / l[static_cast<size_t>(i) * d + i];
    }
  }
  std::vector<double> inv(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = i; k < d; ++k)
        s += li[static_cast<size_t>(k) * d + i] * li[static_cast<size_t>(k) * d + j];
      inv[static_cast<size_t>(i) * d + j] = inv[static_cast<size_t>(j) * d + i] = s;
    }
  return inv;
}

FitResult run_start(std::span<const double> data, int n, const FitOptions& opts,
                    int start_index, double sample_mean) {
  const int d = 2 * n - 1;
  std::vector<double> x0(d);
  if (start_index == 0) {
    // method-of-moments exponential seed replicated across phases
    const double r = std::log(1.0 / sample_mean);
    std::fill(x0.begin(), x0.end(), r);
  } else {
    SplitMix64 rng = SplitMix64::stream(opts.seed, static_cast<uint64_t>(start_index));
    const double lo = std::log(opts.init_low / sample_mean);
    const double hi = std::log(opts.init_high / sample_mean);
    for (double& xi : x0) xi = lo + (hi - lo) * rng.next_open01();
  }

  auto objective = [&](std::span<const double> x) { return neg_loglik_at(n, x, data); };
  const long max_evals = static_cast<long>(opts.max_iterations_per_param) * d;
  SimplexOutcome sim = nelder_mead(objective, x0, 0.25, opts.f_tol, opts.x_tol, max_evals);

  FitResult res;
  res.params = decode(n, sim.x);
  res.loglik = -sim.f;
  res.converged = sim.converged && std::isfinite(res.loglik);
  res.n_iterations = sim.iterations;
  res.aic = 2.0 * d - 2.0 * res.loglik;
  res.start_index = start_index;
  if (opts.compute_standard_errors && res.converged)
    res.standard_errors = standard_errors(res.params, data);
  return res;
}

} // namespace

double loglik(const CoxianParams& p, std::span<const double> data) {
  validate(p);
  for (double t : data)
    if (!(t > 0.0) || !std::isfinite(t))
      throw validation_error("loglik: observations must be positive and finite");
  const DensityEvaluator f(build_generator(p));
  double ll = 0.0;
  for (double t : data) {
    const double ft = f(t);
    if (ft <= 0.0 || !std::isfinite(ft)) return -kInf;
    ll += std::log(ft);
  }
  return ll;
}

std::vector<FitResult> fit_mle(std::span<const double> data, int n, const FitOptions& opts) {
  if (n < 1) throw validation_error("fit_mle: n must be >= 1");
  if (data.empty()) throw validation_error("fit_mle: data must be nonempty");
  for (double t : data)
    if (!(t > 0.0) || !std::isfinite(t))
      throw validation_error("fit_mle: observations must be positive and finite");
  if (opts.n_starts < 1) throw validation_error("fit_mle: n_starts must be >= 1");

  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / data.size();

  std::vector<std::future<FitResult>> futures;
  futures.reserve(opts.n_starts);
  for (int s = 0; s < opts.n_starts; ++s)
    futures.push_back(std::async(std::launch::async, run_start, data, n, std::cref(opts), s, mean));
  std::vector<FitResult> results;
  results.reserve(opts.n_starts);
  for (auto& fut : futures) results.push_back(fut.get());

  std::stable_sort(results.begin(), results.end(), [](const FitResult& a, const FitResult& b) {
    if (a.loglik != b.loglik) return a.loglik > b.loglik;
    return a.start_index < b.start_index;
  });
  return results;
}

OrderSelection select_order(std::span<const double> data, int n_max, const FitOptions& opts) {
  if (n_max < 1) throw validation_error("select_order: n_max must be >= 1");
  OrderSelection sel;
  sel.per_order.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) sel.per_order.push_back(fit_mle(data, n, opts).front());

  double best_aic = kInf;
  for (const FitResult& r : sel.per_order) {
    if (!r.converged) continue;
    if (r.aic < best_aic) {
      best_aic = r.aic;
      sel.best_order = r.params.order();
    }
  }
  if (sel.best_order == 0) {  // nothing converged; fall back to raw AIC
    for (const FitResult& r : sel.per_order)
      if (r.aic < best_aic) {
        best_aic = r.aic;
        sel.best_order = r.params.order();
      }
  }
  return sel;
}

std::optional<std::vector<double>> standard_errors(const CoxianParams& p,
                                                   std::span<const double> data) {
  validate(p);
  const int n = p.order();
  const int d = 2 * n - 1;
  std::vector<double> theta(d);
  for (int i = 0; i < n - 1; ++i) theta[i] = p.lambda[i];
  for (int i = 0; i < n; ++i) theta[n - 1 + i] = p.mu[i];

  std::vector<double> h(d);
  for (int i = 0; i < d; ++i) h[i] = std::max(1e-5, 1e-4 * std::abs(theta[i]));
  // central differences need an interior point
  for (int i = 0; i < d; ++i)
    if (theta[i] - h[i] < 0.0 || (i != n - 1 + n - 1 && i >= n - 1 ? false : theta[i] - h[i] <= 0.0))
      return std::nullopt;

  auto ll_at = [&](const std::vector<double>& th) {
    std::vector<double> lambda(th.begin(), th.begin() + (n - 1));
    std::vector<double> mu(th.begin() + (n - 1), th.end());
    return loglik(make_params(std::move(lambda), std::move(mu)), data);
  };

  const double f0 = ll_at(theta);
  if (!std::isfinite(f0)) return std::nullopt;

  std::vector<double> hess(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    std::vector<double> tp = theta, tm = theta;
    tp[i] += h[i];
    tm[i] -= h[i];
    const double fp = ll_at(tp), fm = ll_at(tm);
    if (!std::isfinite(fp) || !std::isfinite(fm)) return std::nullopt;
    hess[static_cast<size_t>(i) * d + i] = -(fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      std::vector<double> tpp = theta, tpm = theta, tmp = theta, tmm = theta;
      tpp[i] += h[i]; tpp[j] += h[j];
      tpm[i] += h[i]; tpm[j] -= h[j];
      tmp[i] -= h[i]; tmp[j] += h[j];
      tmm[i] -= h[i]; tmm[j] -= h[j];
      const double v = ll_at(tpp) - ll_at(tpm) - ll_at(tmp) + ll_at(tmm);
      if (!std::isfinite(v)) return std::nullopt;
      const double hij = -v / (4.0 * h[i] * h[j]);
      hess[static_cast<size_t>(i) * d + j] = hess[static_cast<size_t>(j) * d + i] = hij;
    }
  }

  std::vector<double> inv = chol_inverse(std::move(hess), d);
  if (inv.empty()) return std::nullopt;
  std::vector<double> se(d);
  for (int i = 0; i < d; ++i) {
    const double v = inv[static_cast<size_t>(i) * d + i];
    if (v <= 0.0 || !std::isfinite(v)) return std::nullopt;
    se[i] = std::sqrt(v);
  }
  return se;
}

} // namespace coxian
