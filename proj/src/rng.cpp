#include "wonham/rng.hpp"

#include <cmath>

namespace wonham {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t stream_id,
                            std::uint64_t purpose) {
  // spread the key over the full 312-word mt19937_64 state
  std::uint64_t key = master_seed;
  key ^= splitmix64(stream_id) + 0x9e3779b97f4a7c15ULL;
  std::uint64_t mixer = key ^ (purpose * 0xd6e8feb86659fd93ULL);
  std::seed_seq seq{
      static_cast<std::uint32_t>(splitmix64(mixer)),
      static_cast<std::uint32_t>(splitmix64(mixer) >> 32),
      static_cast<std::uint32_t>(splitmix64(mixer)),
      static_cast<std::uint32_t>(splitmix64(mixer) >> 32),
      static_cast<std::uint32_t>(splitmix64(mixer)),
      static_cast<std::uint32_t>(splitmix64(mixer) >> 32),
      static_cast<std::uint32_t>(splitmix64(mixer)),
      static_cast<std::uint32_t>(splitmix64(mixer) >> 32),
  };
  return std::mt19937_64(seq);
}

}  // namespace

RandomSource::RandomSource(const RngStream& stream, RngPurpose purpose)
    : engine_(make_engine(stream.master_seed, stream.stream_id,
                          static_cast<std::uint64_t>(purpose))) {}

double RandomSource::uniform() {
  // 53 significant bits, centered away from both endpoints
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(angle);
  has_cached_normal_ = true;
  return r * std::cos(angle);
}

double RandomSource::exponential(double rate) {
  return -std::log(uniform()) / rate;
}

int RandomSource::discrete(const double* weights, int n) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += weights[i];
  double target = uniform() * total;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  return n - 1;  // guard against roundoff at the upper edge
}

}  // namespace wonham
