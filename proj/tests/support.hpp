#pragma once

// Seeded generators for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }
    bool coin() { return integer(0, 1) == 1; }

    /// n points in [lo, hi] with pairwise distance at least min_gap, in random order.
    std::vector<double> separated_points(std::size_t n, double lo, double hi, double min_gap) {
        std::vector<double> out;
        while (out.size() < n) {
            const double x = uniform(lo, hi);
            const bool far = std::all_of(out.begin(), out.end(), [&](double y) { return std::abs(x - y) >= min_gap; });
            if (far) out.push_back(x);
        }
        return out;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Runs `body(rng, case_index)` for `cases` independent seeds derived from `seed`.
template <typename Body>
void for_all(int cases, std::uint64_t seed, Body&& body) {
    for (int i = 0; i < cases; ++i) {
        Rng rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(i));
        body(rng, i);
    }
}

inline double relative_error(double got, double want) {
    return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

}  // namespace testing
