#pragma once

#include <cstdint>
#include <random>

namespace wonham {

enum class RngPurpose : std::uint64_t { chain = 1, noise = 2, init = 3 };

/* Keyed stream handle: (master_seed, stream_id) identifies a replication,
 * the purpose tag separates the chain / observation-noise / initial-draw
 * substreams so that, e.g., refining dt never perturbs the chain path. */
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

/* Deterministic generator for one (stream, purpose) pair.  Built on
 * mt19937_64 (output fully specified by the standard) seeded through a
 * splitmix64 expansion of the key; all variate transforms are explicit so
 * results are bit-identical across platforms and thread counts. */
class RandomSource {
public:
  RandomSource(const RngStream& stream, RngPurpose purpose);

  // uniform on the open interval (0,1); never returns 0 or 1
  double uniform();
  // standard normal via Box-Muller (caches the second variate)
  double normal();
  // exponential with the given rate
  double exponential(double rate);
  // index in [0,n) with probability weights[i]/sum(weights)
  int discrete(const double* weights, int n);

private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace wonham
