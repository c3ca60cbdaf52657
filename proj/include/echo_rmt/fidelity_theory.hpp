#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "echo_rmt/common.hpp"
#include "echo_rmt/ensembles.hpp"
#include "echo_rmt/quadrature.hpp"
#include "echo_rmt/spectral_stats.hpp"

namespace echo_rmt {

enum class TheoryKind { LR, ELR, SusyGUE, SusyGOE, FreezeLR };

inline std::string_view to_string(TheoryKind kind)
{
    switch (kind) {
    case TheoryKind::LR: return "lr";
    case TheoryKind::ELR: return "elr";
    case TheoryKind::SusyGUE: return "susy-gue";
    case TheoryKind::SusyGOE: return "susy-goe";
    case TheoryKind::FreezeLR: return "freeze";
    }
    return "?";
}

inline TheoryKind parse_theory_kind(std::string_view name)
{
    for (auto k : {TheoryKind::LR, TheoryKind::ELR, TheoryKind::SusyGUE, TheoryKind::SusyGOE, TheoryKind::FreezeLR}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown theory kind '" + std::string(name) + "'");
}

/// Relative tolerances of the exact-fidelity quadratures.
inline constexpr double kSusyGueTolerance = 1e-8;
inline constexpr double kSusyGoeTolerance = 1e-6;

/*
 * The eps^2 bracket of the second-order echo expansion,
 *     t tau_H / 2 + t^2 / beta_V - C(t),
 * C the double integral of b2 over the chosen domain.
 */
inline double fidelity_bracket(double t, double tau_h, int beta_v, EnsembleKind h0_kind,
                               CorrelationConvention convention = CorrelationConvention::Triangle)
{
    require(t >= 0.0, "fidelity: t must be nonnegative");
    require(beta_v == 1 || beta_v == 2, "fidelity: beta_V must be 1 or 2");
    return t * tau_h / 2.0 + t * t / beta_v - correlation_integral(t, tau_h, h0_kind, convention);
}

/// Linear response <f(t)> = 1 - eps^2 [t tau_H/2 + t^2/beta_V - C(t)].
inline double lr_fidelity_amplitude(double epsilon, double t, double tau_h, int beta_v, EnsembleKind h0_kind,
                                    CorrelationConvention convention = CorrelationConvention::Triangle)
{
    return 1.0 - epsilon * epsilon * fidelity_bracket(t, tau_h, beta_v, h0_kind, convention);
}

/// Exponentiated linear response, exp of minus the same bracket.
inline double elr_fidelity_amplitude(double epsilon, double t, double tau_h, int beta_v, EnsembleKind h0_kind,
                                     CorrelationConvention convention = CorrelationConvention::Triangle)
{
    return std::exp(-epsilon * epsilon * fidelity_bracket(t, tau_h, beta_v, h0_kind, convention));
}

/*
 * Exact <f(t)> for GUE H0 and GUE V in the N -> infinity limit, tau_H = 1:
 *     (1/t) int_0^min(t,1) du (1 + t - 2u) exp(-eps^2 (1 + t - 2u) t / 2).
 * For weak decay the deficit 1 - f is integrated directly (the undamped
 * integrand integrates to exactly t), which keeps full relative accuracy on
 * 1 - f as eps -> 0.
 */
inline double susy_fidelity_gue(double epsilon, double t)
{
    require(t >= 0.0, "susy_fidelity_gue: t must be nonnegative");
    if (t == 0.0) {
        return 1.0;
    }
    const double a = epsilon * epsilon * t / 2.0;
    const double upper = std::min(t, 1.0);
    if (a * (1.0 + t) < 1.0) {
        auto deficit = [&](double u) {
            const double w = 1.0 + t - 2.0 * u;
            return -w * std::expm1(-a * w);
        };
        return 1.0 - integrate(deficit, 0.0, upper, kSusyGueTolerance).value / t;
    }
    auto direct = [&](double u) {
        const double w = 1.0 + t - 2.0 * u;
        return w * std::exp(-a * w);
    };
    // The integrand is concentrated near u = 1 for strong perturbations.
    return integrate(direct, 0.0, upper, kSusyGueTolerance, 1e-300).value / t;
}

namespace detail {

/*
 * GOE double integral with both integrable singularities removed:
 *   v = u sin(phi) cancels 1/sqrt(u^2 - v^2);
 *   u = t - s^2 cancels the 1/sqrt(t - u) left by (t - u)/(t^2 - v^2)^2 at the corner.
 * `damping(x)` receives x = (2u+1)t - t^2 + v^2.
 */
template <class Damping>
double goe_double_integral(double t, Damping&& damping)
{
    const double u_lo = std::max(0.0, t - 1.0);
    const double s_max = std::sqrt(t - u_lo);
    auto outer = [&](double s) {
        const double u = t - s * s;
        if (s == 0.0 || u <= 0.0) {
            return 0.0;
        }
        const double one_minus = 1.0 - t + u;
        auto inner = [&](double phi) {
            const double v = u * std::sin(phi);
            const double x = (2.0 * u + 1.0) * t - t * t + v * v;
            // t^2 - v^2 = (t^2 - u^2) + u^2 cos^2(phi), both terms nonnegative.
            const double c = u * std::cos(phi);
            const double gap = s * s * (t + u) + c * c;
            return v * x / (gap * gap * std::sqrt((u + 1.0) * (u + 1.0) - v * v)) * damping(x);
        };
        const double half_pi = kPi / 2.0;
        // The inner integrand peaks within ~s of phi = pi/2.
        const double split = std::max(0.0, half_pi - 4.0 * s);
        double acc = 0.0;
        if (split > 0.0) {
            acc += integrate(inner, 0.0, split, kSusyGoeTolerance * 1e-2, 1e-300).value;
        }
        acc += integrate(inner, split, half_pi, kSusyGoeTolerance * 1e-2, 1e-300).value;
        // du = 2 s ds, (t - u) = s^2.
        return 2.0 * s * s * s * one_minus * acc;
    };
    return 2.0 * integrate(outer, 0.0, s_max, kSusyGoeTolerance * 1e-2, 1e-300).value;
}

} // namespace detail

/*
 * Exact <f(t)> for GOE H0 and GOE V, tau_H = 1:
 *   2 int_{max(0,t-1)}^t du int_0^u dv
 *     (t-u)(1-t+u) v ((2u+1)t - t^2 + v^2) / [(t^2-v^2)^2 sqrt((u^2-v^2)((u+1)^2-v^2))]
 *     x exp(-eps^2 [(2u+1)t - t^2 + v^2] / 2).
 * The undamped integral equals one, so weak decay is evaluated as one minus the
 * integral of the deficit 1 - exp(-x).
 */
inline double susy_fidelity_goe(double epsilon, double t)
{
    require(t >= 0.0, "susy_fidelity_goe: t must be nonnegative");
    if (t == 0.0) {
        return 1.0;
    }
    const double e2 = epsilon * epsilon;
    const double x_max = e2 * ((2.0 * t + 1.0) * t) / 2.0;
    if (x_max < 1.0) {
        return 1.0 - detail::goe_double_integral(t, [&](double x) { return -std::expm1(-e2 * x / 2.0); });
    }
    return detail::goe_double_integral(t, [&](double x) { return std::exp(-e2 * x / 2.0); });
}

/*
 * Linear response for GUE H0 with a zero-diagonal perturbation: the t^2 term
 * is absent and the correlation integral cancels the linear term after tau_H,
 * leaving the plateau 1 - eps^2 tau_H^2 / 6 for t >= tau_H.
 */
inline double freeze_lr_fidelity(double epsilon, double t, double tau_h)
{
    require(t >= 0.0, "freeze_lr_fidelity: t must be nonnegative");
    require(tau_h > 0.0, "freeze_lr_fidelity: tau_h must be positive");
    const double e2 = epsilon * epsilon;
    if (t >= tau_h) {
        return 1.0 - e2 * tau_h * tau_h / 6.0;
    }
    // t tau_H/2 - (t^2/2 - t^3/(6 tau_H))
    return 1.0 - e2 * (t * tau_h / 2.0 - t * t / 2.0 + t * t * t / (6.0 * tau_h));
}

/// Plateau value of freeze_lr_fidelity.
inline double freeze_plateau(double epsilon, double tau_h)
{
    return 1.0 - epsilon * epsilon * tau_h * tau_h / 6.0;
}

/*
 * f depends on (eps, t) only through eps^2 t tau_H and eps^2 t^2, so measuring
 * time in units of tau_H requires eps -> eps tau_H.
 */
inline double map_epsilon_units(double epsilon_native, double tau_h_native)
{
    require(tau_h_native > 0.0, "map_epsilon_units: tau_h must be positive");
    return epsilon_native * tau_h_native;
}

inline double unmap_epsilon_units(double epsilon_theory, double tau_h_native)
{
    require(tau_h_native > 0.0, "unmap_epsilon_units: tau_h must be positive");
    return epsilon_theory / tau_h_native;
}

/// A closed-form prediction tabulated on a time grid, with its conventions.
struct TheoryCurve {
    TheoryKind kind = TheoryKind::ELR;
    double epsilon = 0.0;
    int beta_v = 2;
    EnsembleKind h0_kind = EnsembleKind::GUE;
    CorrelationConvention convention = CorrelationConvention::Triangle;
    double tau_h = 1.0;
    std::vector<double> t;
    std::vector<double> value;
};

inline double evaluate_theory(const TheoryCurve& c, double t)
{
    switch (c.kind) {
    case TheoryKind::LR: return lr_fidelity_amplitude(c.epsilon, t, c.tau_h, c.beta_v, c.h0_kind, c.convention);
    case TheoryKind::ELR: return elr_fidelity_amplitude(c.epsilon, t, c.tau_h, c.beta_v, c.h0_kind, c.convention);
    case TheoryKind::SusyGUE: return susy_fidelity_gue(c.epsilon, t / c.tau_h);
    case TheoryKind::SusyGOE: return susy_fidelity_goe(c.epsilon, t / c.tau_h);
    case TheoryKind::FreezeLR: return freeze_lr_fidelity(c.epsilon, t, c.tau_h);
    }
    throw ConfigError("evaluate_theory: unknown kind");
}

/// Fills `curve.value` on `grid`. SUSY kinds assume tau_h = 1 (eps in those units).
inline TheoryCurve tabulate_theory(TheoryCurve curve, std::vector<double> grid)
{
    curve.t = std::move(grid);
    curve.value.clear();
    curve.value.reserve(curve.t.size());
    for (double t : curve.t) {
        curve.value.push_back(evaluate_theory(curve, t));
    }
    return curve;
}

} // namespace echo_rmt
