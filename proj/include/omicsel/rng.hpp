#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace omicsel {

// All randomized operations in the toolkit derive their seeds from a single
// 64-bit root seed through derive_seed(root, label). The label keeps stages
// independent: adding a new stage never perturbs the stream of an existing one.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

// Deterministic RNG wrapper. std::mt19937_64's bit stream is pinned by the
// standard; the distributions below are hand-rolled because the standard
// library's are implementation-defined and would break frozen test values.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, bound), bound >= 1. Rejection sampling, unbiased.
    std::uint64_t uniform_below(std::uint64_t bound);

    // Uniform real in [0, 1) with 53 random bits.
    double uniform01();

    // Standard normal via Box-Muller (caches the second deviate).
    double gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i + 1));
            std::swap(v[i], v[j]);
        }
    }

    // n distinct indices drawn from [0, pool) in sorted order.
    std::vector<std::size_t> sample_indices(std::size_t pool, std::size_t n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace omicsel
