#ifndef COXIAN_FITTER_HPP
#define COXIAN_FITTER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coxian/model.hpp"

namespace coxian {

// Outcome of one optimization start.
struct FitResult {
  CoxianParams params;
  double loglik = 0.0;
  bool converged = false;
  int n_iterations = 0;
  std::optional<std::vector<double>> standard_errors;  // length 2n-1 when available
  double aic = 0.0;
  int start_index = 0;
};

struct FitOptions {
  int n_starts = 10;
  int max_iterations_per_param = 5000;  // evaluation cap is this times (2n-1)
  double f_tol = 1e-8;                  // simplex function-value spread
  double x_tol = 1e-8;                  // simplex parameter spread
  double init_low = 0.01;               // initial rates drawn in [low/mean, high/mean]
  double init_high = 100.0;
  uint64_t seed = 1;
  bool compute_standard_errors = true;
};

// Per-order summary produced by select_order.
struct OrderSelection {
  int best_order = 0;
  std::vector<FitResult> per_order;  // best result for n = 1..n_max, in order
};

// Log-likelihood sum_i log f(t_i); returns -inf when the density underflows
// at any observation. Throws validation_error on nonpositive observations.
double loglik(const CoxianParams& p, std::span<const double> data);

// Multi-start Nelder-Mead maximum likelihood in log-rate coordinates.
// Returns one FitResult per start, best log-likelihood first; starts run in
// parallel and the ordering is deterministic.
std::vector<FitResult> fit_mle(std::span<const double> data, int n, const FitOptions& opts);

// Fit n = 1..n_max and pick the AIC-minimizing order among converged fits.
OrderSelection select_order(std::span<const double> data, int n_max, const FitOptions& opts);

// Observed-information standard errors at an interior maximum, by central
// finite differences of the log-likelihood in rate coordinates. nullopt when
// the information matrix is not positive definite or the estimate sits on
// the boundary.
std::optional<std::vector<double>> standard_errors(const CoxianParams& p,
                                                   std::span<const double> data);

} // namespace coxian

#endif
