#include "remlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace remlab::analytic {

namespace {

void require_positive_time(double t)
{
    if (!(t > 0.0)) {
        throw std::invalid_argument("trajectory length t must be positive");
    }
}

// ln cosh without overflow for large arguments.
double log_cosh(double x) noexcept
{
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

double Constants::beta_c() noexcept { return std::sqrt(2.0 * std::numbers::ln2); }
double Constants::t_c() noexcept { return std::numbers::ln2; }
double Constants::lambda_1() noexcept { return 1.0 / beta_c(); }
double Constants::lambda_2() noexcept { return 2.0 / beta_c(); }
double Constants::qrem_lambda_2() noexcept { return beta_c() / std::acosh(2.0); }
double Constants::qrem_T_c() noexcept { return std::acosh(2.0); }

double p_rem(double beta) noexcept
{
    const double b = std::fabs(beta);
    const double bc = Constants::beta_c();
    if (b <= bc) {
        return 0.5 * b * b;
    }
    return b * bc - std::numbers::ln2;
}

double theta_limit(double t, double lambda, double s)
{
    require_positive_time(t);
    return std::max(std::exp(-s), p_rem(t * lambda) / t) - 1.0;
}

RateValue rate_function(double t, double u, double s)
{
    require_positive_time(t);
    if (s != 0.0) {
        return rate_function_numeric(t, u, s);
    }
    const double bc = Constants::beta_c();
    const double au = std::fabs(u);
    if (au > bc) {
        return RateValue::infinity();
    }
    if (t <= Constants::t_c()) {
        // Active boundary on the quadratic branch at lambda* = sqrt(2/t).
        if (au <= std::sqrt(2.0 * t)) {
            return RateValue::finite(au * std::sqrt(2.0 / t));
        }
        return RateValue::finite(1.0 + u * u / (2.0 * t));
    }
    // Active boundary on the frozen branch at lambda* = (1 + ln2/t) / beta_c.
    return RateValue::finite(au * (1.0 + std::numbers::ln2 / t) / bc);
}

RateValue rate_function_numeric(double t, double u, double s, double tol)
{
    require_positive_time(t);
    const double bc = Constants::beta_c();
    const double au = std::fabs(u);
    if (au > bc) {
        return RateValue::infinity();
    }
    const auto objective = [&](double lambda) { return au * lambda - theta_limit(t, lambda, s); };

    // The maximizer lies below max(kink of the active branch, beta_c / t, |u| / t).
    const double kink = (std::exp(-s) + std::numbers::ln2 / t) / bc;
    const double lambda_max = std::max({10.0, 2.0 * au / std::min(t, 1.0) * bc,
                                        2.0 * kink + 2.0 * bc / t});

    constexpr double inv_phi = 0.6180339887498948482;
    double a = 0.0;
    double b = lambda_max;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        }
        else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    const double best = std::max({fc, fd, objective(0.5 * (a + b)), objective(0.0)});
    return RateValue::finite(best);
}

std::string_view to_string(PhaseKind kind) noexcept
{
    switch (kind) {
    case PhaseKind::Active:
        return "Active";
    case PhaseKind::InactiveGlass:
        return "InactiveGlass";
    case PhaseKind::InactiveParamagnetic:
        return "InactiveParamagnetic";
    case PhaseKind::Boundary:
        return "Boundary";
    }
    return "?";
}

std::string_view to_string(BoundaryKind kind) noexcept
{
    switch (kind) {
    case BoundaryKind::ActiveGlass:
        return "ActiveGlass";
    case BoundaryKind::ActivePara:
        return "ActivePara";
    case BoundaryKind::GlassPara:
        return "GlassPara";
    case BoundaryKind::Triple:
        return "Triple";
    }
    return "?";
}

std::string to_string(const PhaseLabel& label)
{
    std::string out(to_string(label.kind()));
    if (auto detail = label.boundary_detail()) {
        out += "(";
        out += to_string(*detail);
        out += ")";
    }
    return out;
}

namespace {

Activity activity_of(const PhaseLabel& label) noexcept
{
    switch (label.kind()) {
    case PhaseKind::Active:
        return {1.0, 1.0};
    case PhaseKind::InactiveGlass:
    case PhaseKind::InactiveParamagnetic:
        return {0.0, 0.0};
    case PhaseKind::Boundary:
        if (label.boundary_detail() == BoundaryKind::GlassPara) {
            return {0.0, 0.0};
        }
        return {0.0, 1.0};
    }
    return {0.0, 0.0};
}

}  // namespace

PhasePoint classify_phase(double t, double lambda, double tol)
{
    require_positive_time(t);
    if (lambda < 0.0) {
        throw std::invalid_argument("classify_phase: lambda must be non-negative");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("classify_phase: tol must be positive");
    }
    const double bc = Constants::beta_c();
    const double x = t * lambda;
    const double a = p_rem(x) / t;

    PhaseLabel label = PhaseLabel::active();
    if (std::fabs(a - 1.0) <= tol) {
        if (std::fabs(x - bc) <= tol * bc) {
            label = PhaseLabel::boundary(BoundaryKind::Triple);
        }
        else if (x > bc) {
            label = PhaseLabel::boundary(BoundaryKind::ActiveGlass);
        }
        else {
            label = PhaseLabel::boundary(BoundaryKind::ActivePara);
        }
    }
    else if (a > 1.0) {
        if (x > bc * (1.0 + tol)) {
            label = PhaseLabel::glass();
        }
        else if (x < bc * (1.0 - tol)) {
            label = PhaseLabel::paramagnetic();
        }
        else {
            label = PhaseLabel::boundary(BoundaryKind::GlassPara);
        }
    }

    PhasePoint point;
    point.t = t;
    point.lambda = lambda;
    point.s = 0.0;
    point.theta = std::max(1.0, a) - 1.0;
    point.label = label;
    point.activity = activity_of(label);
    return point;
}

BoundaryCurves boundary_curves(double lambda, double tol)
{
    if (lambda < 0.0 || std::isnan(lambda)) {
        throw std::invalid_argument("boundary_curves: lambda must be non-negative");
    }
    const double bc = Constants::beta_c();
    const double lambda_1 = Constants::lambda_1();
    const double lambda_2 = Constants::lambda_2();

    BoundaryCurves curves;
    curves.lambda = lambda;
    curves.branch_switch_inverse_time = lambda / bc;

    if (lambda <= lambda_1 * (1.0 + tol)) {
        return curves;
    }
    if (std::fabs(lambda - lambda_2) <= tol * lambda_2) {
        curves.critical.push_back({0.5 * lambda * lambda, BoundaryKind::Triple});
    }
    else if (lambda < lambda_2) {
        curves.critical.push_back({2.0 * lambda / bc - 2.0 / (bc * bc), BoundaryKind::ActiveGlass});
    }
    else {
        curves.critical.push_back({lambda / bc, BoundaryKind::GlassPara});
        curves.critical.push_back({0.5 * lambda * lambda, BoundaryKind::ActivePara});
    }
    return curves;
}

Activity activity_limit(double t, double lambda, double tol)
{
    return classify_phase(t, lambda, tol).activity;
}

double qrem_pressure(double beta, double lambda, double s)
{
    return std::max(log_cosh(beta * std::exp(-s)), p_rem(beta * lambda));
}

}  // namespace remlab::analytic
