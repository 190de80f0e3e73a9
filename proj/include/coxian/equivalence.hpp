#ifndef COXIAN_EQUIVALENCE_HPP
#define COXIAN_EQUIVALENCE_HPP

#include <optional>
#include <string>
#include <vector>

#include "coxian/linalg.hpp"
#include "coxian/model.hpp"

namespace coxian {

// Lower-triangular similarity transform between two equivalent Coxian
// generators: first row is e1 and every row sums to one.
struct TransformMatrix {
  Matrix m;
};

struct EquivalenceReport {
  bool equivalent = false;
  std::optional<TransformMatrix> m;
  double max_residual = 0.0;            // ||M Qb - Qa M||_inf / scale
  double mu1_gap = 0.0;                 // |mu_a1 - mu_b1|
  std::vector<double> moment_gaps;      // relative, r = 1..2n-1
  std::string reason;                   // set when not equivalent
};

// Absorption rate from phase 1, invariant across equivalent representations.
double mu1(const Generator& g);

// Build M row by row from the similarity difference equation, enforcing unit
// row sums; nullopt when a terminal consistency equation fails beyond
// tol * max(||Qa||, ||Qb||). Throws dimension_error on order mismatch.
std::optional<TransformMatrix> build_transform(const Generator& qa, const Generator& qb,
                                               double tol = 1e-8);

// Full equivalence verdict: transform residual, absorbing-vector condition,
// row sums, and agreement of the first 2n-1 moments all within tol.
EquivalenceReport check_equivalent(const Generator& qa, const Generator& qb,
                                   double tol = 1e-8);

} // namespace coxian

#endif
