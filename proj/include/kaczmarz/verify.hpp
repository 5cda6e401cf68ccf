#pragma once

//
// Property suites behind `kaczmarz verify`. Each property tracks its worst
// violation over many seeded cases and passes when that stays within its
// tolerance.
//

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "kaczmarz/solvers.hpp"

namespace kaczmarz {

/// The step rules a suite exercises. Defaults are the library rules; tests
/// swap in broken ones to check that the suites notice.
struct StepRules
{
    using PlainRule = std::function<Vector(std::span<const double>, const DenseMatrix&, std::span<const double>,
                                           std::size_t)>;
    using PenaltyRule = std::function<Vector(std::span<const double>, const DenseMatrix&, std::span<const double>,
                                             std::size_t, double)>;
    using AugmentedRule = std::function<RakStep(std::span<const double>, double, const DenseMatrix&,
                                                std::span<const double>, std::size_t, double)>;

    PlainRule rk_ls = rk_step_ls;
    PlainRule rk_lf = rk_step_lf;
    PenaltyRule rpk_ls = rpk_step_ls;
    PenaltyRule rpk_lf = rpk_step_lf;
    AugmentedRule rak_ls = rak_step_ls;
    AugmentedRule rak_lf = rak_step_lf;
};

struct PropertyResult
{
    std::string name;
    std::size_t cases = 0;
    double worst = 0.0;      ///< largest violation seen (<= tolerance to pass)
    double tolerance = 0.0;
    bool asserted = true;    ///< false for informational diagnostics
    std::string worst_case;  ///< inputs of the worst case, for reproduction

    bool passed() const { return !asserted || worst <= tolerance; }
};

struct SuiteReport
{
    std::vector<PropertyResult> properties;

    bool all_passed() const;

    /// One line per property; failing lines carry the worst case inputs.
    std::string format() const;
};

inline constexpr std::string_view kSuiteNames[] = {"steps", "theorems", "lf", "all"};

/// Throws InvalidInput on an unknown suite name.
SuiteReport run_suite(std::string_view suite, std::uint64_t seed, const StepRules& rules = {});

SuiteReport run_steps_suite(std::uint64_t seed, const StepRules& rules = {});
SuiteReport run_theorems_suite(std::uint64_t seed);
SuiteReport run_lf_suite(std::uint64_t seed);

}  // namespace kaczmarz
