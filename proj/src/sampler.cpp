#include "coxian/sampler.hpp"

#include "coxian/errors.hpp"

namespace coxian {

PathRecord sample_path(const CoxianParams& p, SplitMix64& rng) {
  const int n = p.order();
  PathRecord rec;
  for (int k = 0; k < n; ++k) {
    const double lam = (k < n - 1) ? p.lambda[k] : 0.0;
    const double total = lam + p.mu[k];
    rec.sojourns.push_back(rng.next_exponential(total));
    rec.total += rec.sojourns.back();
    if (k == n - 1) break;                       // last phase always absorbs
    if (rng.next_open01() * total < p.mu[k]) {   // absorb vs advance
      break;
    }
  }
  rec.exit_phase = static_cast<int>(rec.sojourns.size());
  return rec;
}

std::vector<double> sample_dataset(const CoxianParams& p, int n_obs, uint64_t seed) {
  validate(p);
  if (n_obs < 1) throw validation_error("sample_dataset: n_obs must be >= 1");
  std::vector<double> out(n_obs);
  for (int i = 0; i < n_obs; ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<uint64_t>(i));
    out[i] = sample_path(p, rng).total;
  }
  return out;
}

} // namespace coxian
