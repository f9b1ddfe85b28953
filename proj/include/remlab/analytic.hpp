#pragma once

/**
 * @file analytic.hpp
 * @brief Closed-form large-N results for the trajectory REM under the
 *        simple random walk.
 *
 * Conventions: `t` is the trajectory length, `lambda` the strength of the
 * energy tilt and `s` the activity tilt. The limiting scaled cumulant
 * generating function is
 *
 *     theta(t, lambda, s) = max{ e^{-s}, p_rem(t lambda) / t } - 1,
 *
 * with p_rem the pressure of the Random Energy Model. All functions here are
 * pure and thread-safe.
 */

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace remlab::analytic {

/// Named constants of the phase diagrams.
struct Constants
{
    /// Inverse freezing temperature sqrt(2 ln 2).
    static double beta_c() noexcept;
    /// Triple-point time beta_c^2 / 2 = ln 2.
    static double t_c() noexcept;
    /// Below lambda_1 the dynamics is active for every t.
    static double lambda_1() noexcept;
    /// Triple-point tilt 2 / beta_c.
    static double lambda_2() noexcept;
    /// Triple-point tilt of the static QREM diagram, beta_c / arcosh(2).
    static double qrem_lambda_2() noexcept;
    /// Triple-point temperature of the static QREM diagram, arcosh(2).
    static double qrem_T_c() noexcept;
};

/// REM pressure: beta^2/2 below beta_c, beta*beta_c - ln 2 above. Even in beta.
double p_rem(double beta) noexcept;

/// Limiting SCGF. Throws std::invalid_argument for t <= 0.
double theta_limit(double t, double lambda, double s);

/// Value of the rate function; `infinite` marks the +infinity branch.
struct RateValue
{
    bool infinite = false;
    double value = 0.0;

    static RateValue finite(double v) noexcept { return {false, v}; }
    static RateValue infinity() noexcept { return {true, 0.0}; }
};

/// Legendre-Fenchel transform sup_lambda (u lambda - theta(t, lambda, s)).
/// Exact closed form at s == 0, golden-section maximization otherwise.
RateValue rate_function(double t, double u, double s);

/// Numerical Legendre-Fenchel transform, golden-section search over
/// lambda in [0, lambda_max] (theta is even in lambda). Used directly for
/// s != 0 and as the independent route for the s == 0 closed form.
RateValue rate_function_numeric(double t, double u, double s, double tol = 1e-10);

enum class PhaseKind { Active, InactiveGlass, InactiveParamagnetic, Boundary };
enum class BoundaryKind { ActiveGlass, ActivePara, GlassPara, Triple };

class PhaseLabel
{
  public:
    static PhaseLabel active() noexcept { return PhaseLabel(PhaseKind::Active, std::nullopt); }
    static PhaseLabel glass() noexcept { return PhaseLabel(PhaseKind::InactiveGlass, std::nullopt); }
    static PhaseLabel paramagnetic() noexcept
    {
        return PhaseLabel(PhaseKind::InactiveParamagnetic, std::nullopt);
    }
    static PhaseLabel boundary(BoundaryKind detail) noexcept
    {
        return PhaseLabel(PhaseKind::Boundary, detail);
    }

    PhaseKind kind() const noexcept { return kind_; }
    std::optional<BoundaryKind> boundary_detail() const noexcept { return detail_; }

    bool operator==(const PhaseLabel&) const = default;

  private:
    PhaseLabel(PhaseKind kind, std::optional<BoundaryKind> detail) noexcept
        : kind_(kind), detail_(detail)
    {
    }

    PhaseKind kind_;
    std::optional<BoundaryKind> detail_;
};

std::string_view to_string(PhaseKind kind) noexcept;
std::string_view to_string(BoundaryKind kind) noexcept;
/// "Active", "InactiveGlass", ..., or "Boundary(Triple)" etc.
std::string to_string(const PhaseLabel& label);

/// Activity -d_s theta at s = 0. A single value inside a phase, the full
/// subdifferential [0, 1] on a boundary of the active phase.
struct Activity
{
    double lo = 0.0;
    double hi = 0.0;

    bool is_interval() const noexcept { return lo != hi; }
};

struct PhasePoint
{
    double t = 0.0;
    double lambda = 0.0;
    double s = 0.0;
    double theta = 0.0;
    Activity activity;
    PhaseLabel label = PhaseLabel::active();
};

inline constexpr double kDefaultPhaseTolerance = 1e-9;

/// Phase at s = 0. Throws for t <= 0, lambda < 0 or tol <= 0.
PhasePoint classify_phase(double t, double lambda, double tol = kDefaultPhaseTolerance);

struct CriticalPoint
{
    double inverse_time = 0.0;
    BoundaryKind kind = BoundaryKind::ActiveGlass;
};

struct BoundaryCurves
{
    double lambda = 0.0;
    /// Phase transitions crossed along the vertical line at `lambda`,
    /// ordered by increasing inverse time.
    std::vector<CriticalPoint> critical;
    /// Inverse time lambda / beta_c where p_rem(t lambda) switches branch.
    /// It is a phase boundary only where the dynamics is inactive.
    double branch_switch_inverse_time = 0.0;
};

/// Critical inverse times t^{-1} at fixed lambda >= 0.
BoundaryCurves boundary_curves(double lambda, double tol = kDefaultPhaseTolerance);

/// Limiting activity at s = 0.
Activity activity_limit(double t, double lambda, double tol = kDefaultPhaseTolerance);

/// Static QREM pressure max{ ln cosh(beta e^{-s}), p_rem(beta lambda) }.
double qrem_pressure(double beta, double lambda, double s);

}  // namespace remlab::analytic
