#pragma once

#include <cstdint>
#include <functional>

namespace meso {

// Counter-based seeding: (root seed, stream index) -> independent substream.
// Identical pairs reproduce identical draws bit-for-bit on every platform.
struct SeedStream {
    std::uint64_t root = 0;
    std::uint64_t index = 0;

    SeedStream substream(std::uint64_t i) const { return {root, index + i}; }
    bool operator==(const SeedStream&) const = default;
};

// xoshiro256++ with splitmix64 state expansion.  All distributions below
// are integer-deterministic, no libm-dependent paths in the generator core.
class Rng {
  public:
    explicit Rng(SeedStream s);

    std::uint64_t next_u64();
    double uniform();       // (0,1), never 0
    double uniform(double a, double b);
    double normal();        // N(0,1), Box-Muller
    double gamma(double shape);  // shape >= 1, Marsaglia-Tsang, unit scale
    double chi(double k);        // chi_k = sqrt(2 * Gamma(k/2))

  private:
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Deterministic parallel map: runs body(i) for i in [0, n) on `threads`
// workers; results must be written to caller-owned slot i so the reduction
// order is independent of scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// Worker count: explicit argument > env MESO_DPP_THREADS > hardware.
int default_threads();

}  // namespace meso
