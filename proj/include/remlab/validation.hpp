#pragma once

// Acceptance suite: ten criteria covering closed forms, oracle equivalence,
// exact finite-n inequalities, convergence trends, Monte Carlo identities and
// the resolvent / projector / boundary-vector estimates. `Full` runs at the
// stated scales; `Quick` shrinks sample counts and system sizes.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace remlab::validation {

enum class Level { Quick, Full };

std::string_view to_string(Level level) noexcept;
/// "quick" or "full"; throws std::invalid_argument otherwise.
Level parse_level(std::string_view name);

inline constexpr int kCriterionCount = 10;

struct CriterionResult
{
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    /// Statistical notes that do not fail the criterion.
    std::vector<std::string> warnings;
    double seconds = 0.0;
};

struct Report
{
    Level level = Level::Quick;
    std::vector<CriterionResult> criteria;
    double seconds = 0.0;

    bool all_pass() const noexcept;
};

/// Runs criterion `id` in [1, 10]. Exceptions thrown by the computation are
/// caught and reported as failures.
CriterionResult run_criterion(int id, Level level);

/// Runs the criteria in order (all of them when `ids` is empty), invoking
/// `on_result` after each one.
Report run(Level level, const std::vector<int>& ids = {},
           const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace remlab::validation
