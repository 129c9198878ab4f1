#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace nc {

// Deterministic random source. Gaussian variates are produced from explicit
// uniform draws (not std::normal_distribution, whose output sequence is
// implementation-defined), so a seed pins the byte-exact output everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t raw() { return gen_(); }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    int uniform_int(int lo, int hi);  // inclusive range

    // Standard real normal, Box-Muller.
    double gauss();

    // Standard complex normal with E|z|^2 = 1.
    std::complex<double> cgauss();

private:
    std::mt19937_64 gen_;
};

// Cheap splitmix-style combiner for deriving independent stream seeds.
uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b = 0);

}  // namespace nc
