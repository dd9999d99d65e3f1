#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bobench {

// Named substreams of a run. Each component draws from its own stream so
// changing one component's draw count does not perturb the others.
enum class StreamId : std::uint64_t {
  Init = 0x9e3779b97f4a7c15ull,
  Noise = 0xbf58476d1ce4e5b9ull,
  Acquisition = 0x94d049bb133111ebull,
  Fitting = 0xd6e8feb86659fd93ull,
  Scratch = 0xa5a5a5a5a5a5a5a5ull,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t run_seed, StreamId id) {
  std::uint64_t s = run_seed ^ static_cast<std::uint64_t>(id);
  splitmix64(s);
  return splitmix64(s);
}

// Deterministic random stream. mt19937_64 is fully specified by the standard
// and the Gaussian draw is generated here by Box-Muller rather than through
// std::normal_distribution, so sequences are reproducible across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t engine_seed) : engine_(engine_seed) {}
  RngStream(std::uint64_t run_seed, StreamId id)
      : engine_(derive_stream_seed(run_seed, id)) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bobench
