#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

/// Generator family behind every seeded stream. Trial t of a multi-trial
/// experiment seeds its sampler with base_seed + t.
inline constexpr std::string_view kRngName = "mt19937_64";

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial) { return base_seed + trial; }

/// Draws row i with probability ||a_i||^2 / ||A||_F^2 by inverse-CDF lookup.
/// Single-owner: each concurrent run needs its own sampler.
class RowSampler
{
public:
    /// Throws InvalidInput if A has a zero row.
    RowSampler(const DenseMatrix& A, std::uint64_t seed);

    std::size_t sample();

    std::span<const double> probabilities() const noexcept { return probabilities_; }
    std::span<const double> cumulative() const noexcept { return cumulative_; }

private:
    std::vector<double> probabilities_;
    std::vector<double> cumulative_;
    std::mt19937_64 rng_;
};

/// p_i = ||a_i||^2 / ||A||_F^2 without building a generator.
std::vector<double> row_probabilities(const DenseMatrix& A);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace kaczmarz
