#ifndef COXIAN_MODEL_HPP
#define COXIAN_MODEL_HPP

#include <vector>

namespace coxian {

// Absolute slack used when checking nonnegativity constraints; violations
// within the slack are snapped onto the boundary, beyond it they are errors.
inline constexpr double kValiditySlack = 1e-12;

// Default hard cap on the number of phases (enumeration cost grows as n!).
inline constexpr int kDefaultMaxOrder = 20;

// Rate parameters (lambda_1..lambda_{n-1}, mu_1..mu_n) of an n-phase Coxian
// chain: lambda_i > 0 are the phase-advance rates, mu_i >= 0 the absorption
// rates, mu_n > 0. lambda_n == 0 by convention and is not stored.
struct CoxianParams {
  std::vector<double> lambda;
  std::vector<double> mu;

  int order() const { return static_cast<int>(mu.size()); }
};

// Upper-bidiagonal generator of the transient part of the chain, stored
// compactly: diag[i] = -(lambda_i + mu_i) < 0, superdiag[i] = lambda_i > 0.
struct Generator {
  std::vector<double> diag;
  std::vector<double> superdiag;

  int order() const { return static_cast<int>(diag.size()); }
};

// Per-phase absorption rates q = -Q*1.
struct AbsorbVector {
  std::vector<double> q;
};

// Closed-form summaries of a model: expected sojourn per phase, probability
// of absorbing from each phase, and the first raw moments.
struct SummaryStats {
  std::vector<double> los;
  std::vector<double> exit_probs;
  std::vector<double> moments;
};

// Validate, snap within-slack boundary violations, and canonicalize interior
// mu entries so that the (diag, superdiag) form round-trips bit-exactly.
// Throws validation_error with the offending index otherwise.
CoxianParams make_params(std::vector<double> lambda, std::vector<double> mu);

// Validate raw (diag, superdiag) storage; snaps mu within slack of zero.
Generator make_generator(std::vector<double> diag, std::vector<double> superdiag);

void validate(const CoxianParams& p);
void validate(const Generator& g);

Generator build_generator(const CoxianParams& p);
CoxianParams params_from_generator(const Generator& g);
AbsorbVector absorbing_vector(const Generator& g);

// r-th raw moment E[T^r] = r! p (-Q)^{-r} 1 via r bidiagonal solves.
// Throws numeric_error when the result overflows.
double moment(const Generator& g, int r);

// Density f(t) = p exp(Qt) q; f(0) == mu_1 exactly.
double density(const Generator& g, double t);

// Survival S(t) = p exp(Qt) 1.
double survival(const Generator& g, double t);

// Laplace transform f*(s) = p (sI - Q)^{-1} q for s > 0, one bidiagonal solve.
double laplace(const Generator& g, double s);

// LoS, exit probabilities, and first n_moments raw moments.
SummaryStats summary(const CoxianParams& p, int n_moments);

// Density evaluator amortizing work across many t values: precomputes the
// mixture-of-exponentials weights when the diagonal entries are separated,
// falls back to the matrix-exponential action otherwise.
class DensityEvaluator {
public:
  explicit DensityEvaluator(const Generator& g);
  double operator()(double t) const;

private:
  Generator gen_;
  double mu1_ = 0.0;            // f(0) cached
  std::vector<double> coef_;    // mixture weights; empty => fallback path
};

} // namespace coxian

#endif
