#include "coxian/enumerator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "coxian/equivalence.hpp"
#include "coxian/errors.hpp"
#include "coxian/linalg.hpp"

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

bool is_identity_perm(const Generator& g, const std::vector<double>& V) {
  return std::equal(V.begin(), V.end(), g.diag.begin(), g.diag.end());
}

// Snap b onto the feasible interval (0, -V] or reject. b == -V (mu == 0) is
// a legal boundary; b <= 0 is not, since a zero superdiagonal leaves the
// Coxian space.
bool snap_bound(double& b, double v_i, RejectionReason& why) {
  const double upper = -v_i;
  if (b > upper) {
    if (b <= upper + kValiditySlack) {
      b = upper;
      return true;
    }
    why = RejectionReason::b_exceeds_bound;
    return false;
  }
  if (b <= kValiditySlack) {
    why = RejectionReason::negative_b;
    return false;
  }
  return true;
}

} // namespace

const char* to_string(RejectionReason r) {
  switch (r) {
    case RejectionReason::none: return "none";
    case RejectionReason::negative_b: return "negative_b";
    case RejectionReason::b_exceeds_bound: return "b_exceeds_bound";
    case RejectionReason::consistency_failure: return "consistency_failure";
    case RejectionReason::moment_mismatch: return "moment_mismatch";
  }
  return "unknown";
}

std::vector<std::vector<double>> diag_permutations(const Generator& g,
                                                   const EnumerateOptions& opts) {
  validate(g);
  const int n = g.order();
  if (n > opts.max_order)
    throw capacity_error("diag_permutations: order " + std::to_string(n) +
                         " exceeds the cap of " + std::to_string(opts.max_order));

  // Group entries that are equal within dedup_tol (relative) into classes so
  // repeated eigenvalues do not multiply the permutation count.
  std::vector<int> order_idx(n);
  std::iota(order_idx.begin(), order_idx.end(), 0);
  std::sort(order_idx.begin(), order_idx.end(),
            [&](int a, int b) { return g.diag[a] < g.diag[b]; });
  std::vector<int> class_of(n, -1);
  std::vector<std::vector<double>> class_values;
  for (int k = 0; k < n; ++k) {
    const int idx = order_idx[k];
    const double d = g.diag[idx];
    if (k > 0) {
      const int prev = order_idx[k - 1];
      const double dp = g.diag[prev];
      if (std::abs(d - dp) <= opts.dedup_tol * std::max(std::abs(d), std::abs(dp))) {
        class_of[idx] = class_of[prev];
        class_values[class_of[idx]].push_back(d);
        continue;
      }
    }
    class_of[idx] = static_cast<int>(class_values.size());
    class_values.push_back({d});
  }

  std::vector<int> identity_ids(n);
  for (int i = 0; i < n; ++i) identity_ids[i] = class_of[i];

  std::vector<std::vector<double>> out;
  out.push_back(g.diag);  // identity first, verbatim

  std::vector<int> ids = identity_ids;
  std::sort(ids.begin(), ids.end());
  do {
    if (ids == identity_ids) continue;
    std::vector<double> v(n);
    std::vector<size_t> cursor(class_values.size(), 0);
    for (int i = 0; i < n; ++i) v[i] = class_values[ids[i]][cursor[ids[i]]++];
    out.push_back(std::move(v));
  } while (std::next_permutation(ids.begin(), ids.end()));
  return out;
}

PermutationCandidate candidate_superdiag(const Generator& g, const std::vector<double>& V,
                                         const EnumerateOptions& opts) {
  validate(g);
  const int n = g.order();
  if (static_cast<int>(V.size()) != n)
    throw dimension_error("candidate_superdiag: V length must equal the generator order");

  PermutationCandidate cand;
  cand.V = V;

  if (n == 1 || is_identity_perm(g, V)) {
    cand.b = g.superdiag;  // Qb = Qa always solves the identity permutation
    cand.feasible = true;
    return cand;
  }

  const double scale = inf_norm(g);
  std::vector<double> b(n - 1);

  // Step 1: mu1 invariance pins b_12.
  b[0] = -V[0] + g.diag[0] + g.superdiag[0];
  if (!snap_bound(b[0], V[0], cand.rejection)) return cand;

  // Remaining b's from the row-sum closure of the transform recurrence:
  // row i+1 of M follows from row i, and forcing its sum to one makes
  // b_i = m_{i+1,i+1} a_{i,i+1} / m_{ii} linear, provided m_{ii} != 0.
  Matrix m(n);
  m(0, 0) = 1.0;
  for (int i = 0; i + 1 < n; ++i) {
    double partial = 0.0;
    for (int c = 0; c <= i; ++c) {
      double v = m(i, c) * (V[c] - g.diag[i]);
      if (c > 0) v += m(i, c - 1) * b[c - 1];
      v /= g.superdiag[i];
      m(i + 1, c) = v;
      partial += v;
    }
    m(i + 1, i + 1) = 1.0 - partial;
    if (i >= 1) {
      if (std::abs(m(i, i)) < 1e-12) {
        cand.rejection = RejectionReason::consistency_failure;
        return cand;
      }
      b[i] = m(i + 1, i + 1) * g.superdiag[i] / m(i, i);
      if (!snap_bound(b[i], V[i], cand.rejection)) return cand;
    }
  }

  // Terminal consistency: the difference equation at the last row, where the
  // (n+1)-th row of M is zero.
  double resid = 0.0;
  for (int c = 0; c < n; ++c) {
    double v = m(n - 1, c) * (V[c] - g.diag[n - 1]);
    if (c > 0) v += m(n - 1, c - 1) * b[c - 1];
    resid = std::max(resid, std::abs(v));
  }
  if (resid > opts.tol * scale) {
    cand.rejection = RejectionReason::consistency_failure;
    return cand;
  }

  Generator qb;
  qb.diag = V;
  qb.superdiag = b;
  if (moment_residual(g, qb) > opts.tol) {
    cand.rejection = RejectionReason::moment_mismatch;
    return cand;
  }

  cand.b = std::move(b);
  cand.feasible = true;
  return cand;
}

double moment_residual(const Generator& qa, const Generator& qb) {
  validate(qa);
  validate(qb);
  if (qa.order() != qb.order())
    throw dimension_error("moment_residual: generators must have the same order");
  const int n = qa.order();
  const int kmax = std::max(n - 2, 1);
  std::vector<double> va(n, 1.0), vb(n, 1.0);
  double worst = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    va = solve_neg(qa, va);
    vb = solve_neg(qb, vb);
    worst = std::max(worst, std::abs(va[0] - vb[0]) / std::abs(va[0]));
  }
  return worst;
}

RepresentationSet enumerate_representations(const Generator& g, const EnumerateOptions& opts) {
  validate(g);
  const int n = g.order();
  std::vector<std::vector<double>> perms = diag_permutations(g, opts);

  RepresentationSet set;
  set.source = params_from_generator(g);
  set.candidates.resize(perms.size());

  // near-duplicate eigenvalues weaken the non-redundancy assumption; note it
  double dmax = 0.0;
  for (double d : g.diag) dmax = std::max(dmax, std::abs(d));
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      min_gap = std::min(min_gap, std::abs(g.diag[i] - g.diag[j]));
  if (n > 1 && min_gap < opts.near_duplicate_tol * dmax)
    set.notes.push_back("near-duplicate diagonal entries (relative gap < 1e-6); "
                        "representations may be numerically fragile");

  const size_t total = perms.size();
  unsigned hw = std::thread::hardware_concurrency();
  const size_t n_workers = std::max<size_t>(1, std::min<size_t>(hw ? hw : 1, total));
  auto work = [&](size_t w) {
    for (size_t r = w; r < total; r += n_workers) {
      PermutationCandidate c = candidate_superdiag(g, perms[r], opts);
      c.perm_index = static_cast<int>(r) + 1;
      set.candidates[r] = std::move(c);
    }
  };
  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  // cross-verify accepted candidates and collect representations in
  // permutation-index order, identity first by construction
  for (auto& cand : set.candidates) {
    if (!cand.feasible) continue;
    Generator qb;
    qb.diag = cand.V;
    qb.superdiag = *cand.b;
    if (cand.perm_index != 1) {
      EquivalenceReport rep = check_equivalent(g, qb, opts.tol);
      if (!rep.equivalent) {
        cand.feasible = false;
        cand.b.reset();
        cand.rejection = RejectionReason::moment_mismatch;
        continue;
      }
    }
    CoxianParams p = params_from_generator(qb);
    bool dup = false;
    for (const CoxianParams& seen : set.representations)
      if (seen.lambda == p.lambda && seen.mu == p.mu) { dup = true; break; }
    if (!dup) set.representations.push_back(std::move(p));
  }
  return set;
}

} // namespace coxian
