#ifndef COXIAN_ENUMERATOR_HPP
#define COXIAN_ENUMERATOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "coxian/model.hpp"

namespace coxian {

enum class RejectionReason {
  none,
  negative_b,
  b_exceeds_bound,
  consistency_failure,
  moment_mismatch,
};

const char* to_string(RejectionReason r);

// One diagonal permutation and the outcome of solving for its superdiagonal.
struct PermutationCandidate {
  int perm_index = 0;                  // 1-based, identity == 1
  std::vector<double> V;               // permuted diagonal
  std::optional<std::vector<double>> b;
  bool feasible = false;
  RejectionReason rejection = RejectionReason::none;
};

// All feasible representations equivalent to the source, identity first.
struct RepresentationSet {
  CoxianParams source;
  std::vector<PermutationCandidate> candidates;
  std::vector<CoxianParams> representations;
  std::vector<std::string> notes;      // e.g. near-duplicate eigenvalue warning
};

struct EnumerateOptions {
  double tol = 1e-8;
  int max_order = kDefaultMaxOrder;
  // Diagonal entries closer than this (relative) collapse to one permutation.
  double dedup_tol = 1e-10;
  // Near-duplicate diagonals below this relative gap get a metadata note.
  double near_duplicate_tol = 1e-6;
};

// Distinct multiset permutations of diag(Q), identity first, then
// lexicographic; duplicates within dedup_tol are emitted once.
// Throws capacity_error above opts.max_order.
std::vector<std::vector<double>> diag_permutations(const Generator& g,
                                                   const EnumerateOptions& opts = {});

// Solve for the superdiagonal of the candidate with diagonal V: b_1 from the
// mu1-invariance closed form, the rest by the row-sum closure of the
// transform recurrence; verified against terminal consistency and the moment
// system. Rejection is a value, not an error.
PermutationCandidate candidate_superdiag(const Generator& g, const std::vector<double>& V,
                                         const EnumerateOptions& opts = {});

// Run candidate_superdiag over every distinct permutation and cross-verify
// accepted candidates with check_equivalent. Candidates evaluate in parallel;
// output order is deterministic (identity, then permutation index).
RepresentationSet enumerate_representations(const Generator& g,
                                            const EnumerateOptions& opts = {});

// max over k = 1..max(n-2, 1) of the relative gap in p (-Q)^{-k} 1 between
// the two generators; the acceptance residual of the moment system.
double moment_residual(const Generator& qa, const Generator& qb);

} // namespace coxian

#endif
