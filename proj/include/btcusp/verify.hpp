#pragma once

/**
 * @file verify.hpp
 * @brief The invariant suite behind `btcusp verify` and the acceptance binary.
 *
 * Every check is an exact equality or an exact bound; the seed fixes all
 * sampled inputs.
 */

#include <cstdint>
#include <string>
#include <vector>

namespace btcusp {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

inline constexpr int kCheckCount = 12;

/// Runs check `id` (1..kCheckCount).
CheckResult run_check(int id, std::uint32_t seed = 1);
std::vector<CheckResult> run_all_checks(std::uint32_t seed = 1);

}  // namespace btcusp
