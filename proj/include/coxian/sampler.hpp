#ifndef COXIAN_SAMPLER_HPP
#define COXIAN_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include "coxian/model.hpp"
#include "coxian/rng.hpp"

namespace coxian {

// One simulated trajectory: sojourn times for the visited phases and the
// phase (1-based) the process absorbed from.
struct PathRecord {
  std::vector<double> sojourns;
  int exit_phase = 0;
  double total = 0.0;
};

// Simulate a single path: at phase k the sojourn is Exponential(lambda_k +
// mu_k) and absorption competes with advancing at probability
// mu_k / (lambda_k + mu_k); the last phase always absorbs.
PathRecord sample_path(const CoxianParams& p, SplitMix64& rng);

// N absorption times, deterministic in (p, n_obs, seed); path i uses the
// (seed, i) substream so chunked parallel generation is byte-identical.
std::vector<double> sample_dataset(const CoxianParams& p, int n_obs, uint64_t seed);

} // namespace coxian

#endif
