#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "echo_rmt/common.hpp"
#include "echo_rmt/ensembles.hpp"
#include "echo_rmt/quadrature.hpp"

namespace echo_rmt {

/// Parameters of the Wigner surmise a s^beta exp(-gamma s^2).
struct SurmiseParams {
    int beta = 2;
    double gamma = 0.0;
    double norm = 0.0;
};

inline SurmiseParams surmise_params(int beta)
{
    require(beta == 1 || beta == 2 || beta == 4, "Wigner surmise: beta must be 1, 2 or 4");
    const double b = beta;
    const double ratio = std::tgamma((b + 2.0) / 2.0) / std::tgamma((b + 1.0) / 2.0);
    const double gamma = ratio * ratio;
    // Normalization: integral of s^b exp(-gamma s^2) is Gamma((b+1)/2) / (2 gamma^((b+1)/2)).
    const double norm = 2.0 * std::pow(gamma, (b + 1.0) / 2.0) / std::tgamma((b + 1.0) / 2.0);
    return {beta, gamma, norm};
}

inline double wigner_surmise_pdf(double s, int beta)
{
    require(s >= 0.0, "Wigner surmise: spacing must be nonnegative");
    const SurmiseParams p = surmise_params(beta);
    return p.norm * std::pow(s, beta) * std::exp(-p.gamma * s * s);
}

/// Cumulative surmise, the regularized lower incomplete gamma P((beta+1)/2, gamma s^2).
inline double wigner_surmise_cdf(double s, int beta)
{
    if (s <= 0.0) {
        return 0.0;
    }
    const SurmiseParams p = surmise_params(beta);
    return boost::math::gamma_p((beta + 1.0) / 2.0, p.gamma * s * s);
}

struct SpacingSet {
    std::vector<double> spacings;
    double mean = 0.0;
};

/// Consecutive differences of a sorted level sequence.
inline SpacingSet nn_spacings(std::span<const double> levels)
{
    require(levels.size() >= 2, "nn_spacings: need at least two levels");
    SpacingSet out;
    out.spacings.reserve(levels.size() - 1);
    for (std::size_t i = 1; i < levels.size(); ++i) {
        out.spacings.push_back(levels[i] - levels[i - 1]);
    }
    out.mean = std::accumulate(out.spacings.begin(), out.spacings.end(), 0.0)
               / static_cast<double>(out.spacings.size());
    return out;
}

/// Spacings of the central `band` fraction of an unfolded spectrum.
inline SpacingSet nn_spacings(const UnfoldedSpectrum& spectrum, double band)
{
    const auto levels = central_band(spectrum, band);
    require(levels.size() >= 3, "nn_spacings: band holds fewer than 3 levels");
    return nn_spacings(levels);
}

/// Kolmogorov-Smirnov distance between the empirical distribution of `samples` and `cdf`.
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf&& cdf)
{
    require(!samples.empty(), "ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
    }
    return d;
}

/*
 * K2(tau) = (1/N) |sum_i exp(2 pi i tau e_i)|^2 for unit-spacing levels e_i;
 * physical time is t = tau * tau_H with tau_H = 2 pi.
 */
inline double form_factor(std::span<const double> levels, double tau)
{
    require(!levels.empty(), "form_factor: no levels");
    double re = 0.0;
    double im = 0.0;
    const double w = 2.0 * kPi * tau;
    for (double e : levels) {
        re += std::cos(w * e);
        im += std::sin(w * e);
    }
    return (re * re + im * im) / static_cast<double>(levels.size());
}

struct FormFactorEstimate {
    double tau = 0.0;
    double value = 0.0;
    std::size_t n_spectra = 0;
    double stderr_value = 0.0;
};

/*
 * Ensemble estimate of <K2> on a window [tau - width/2, tau + width/2]: K2 is
 * averaged over `samples_per_window` equally spaced points in the window and
 * over all spectra; the error is the standard error over spectra.
 */
inline FormFactorEstimate form_factor_window(const std::vector<std::vector<double>>& spectra, double tau,
                                             double width, int samples_per_window = 16)
{
    require(!spectra.empty(), "form_factor_window: no spectra");
    require(samples_per_window >= 1, "form_factor_window: need at least one sample per window");
    std::vector<double> per_spectrum;
    per_spectrum.reserve(spectra.size());
    for (const auto& levels : spectra) {
        double acc = 0.0;
        for (int k = 0; k < samples_per_window; ++k) {
            const double x = samples_per_window == 1
                                 ? tau
                                 : tau - width / 2.0 + width * (k + 0.5) / samples_per_window;
            acc += form_factor(levels, x);
        }
        per_spectrum.push_back(acc / samples_per_window);
    }
    const double n = static_cast<double>(per_spectrum.size());
    const double mean = std::accumulate(per_spectrum.begin(), per_spectrum.end(), 0.0) / n;
    double var = 0.0;
    for (double v : per_spectrum) {
        var += (v - mean) * (v - mean);
    }
    var = per_spectrum.size() > 1 ? var / (n - 1.0) : 0.0;
    return {tau, mean, per_spectrum.size(), std::sqrt(var / n)};
}

/// Two-level form factor of the GUE, 1 - |tau| on |tau| <= 1.
inline double b2_gue(double tau)
{
    const double a = std::abs(tau);
    return a <= 1.0 ? 1.0 - a : 0.0;
}

/// Domain of the double time integral over the two-level form factor.
enum class CorrelationConvention {
    Triangle, ///< integral_0^t dtau integral_0^tau dtau'
    Square    ///< integral_0^t integral_0^t, twice the triangle
};

inline std::string_view to_string(CorrelationConvention c)
{
    return c == CorrelationConvention::Triangle ? "triangle" : "square";
}

inline CorrelationConvention parse_correlation_convention(std::string_view name)
{
    if (name == "triangle") {
        return CorrelationConvention::Triangle;
    }
    if (name == "square") {
        return CorrelationConvention::Square;
    }
    throw ConfigError("unknown correlation convention '" + std::string(name) + "'");
}

namespace detail {

/// integral_0^t (t - s) b2(s / tau_h) ds, the triangle form of the double integral.
inline double triangle_correlation_integral(double t, double tau_h, EnsembleKind h0_kind)
{
    switch (h0_kind) {
    case EnsembleKind::GUE: {
        const double m = std::min(t, tau_h);
        // integral_0^m (t - s)(1 - s/tau_h) ds
        return t * m - m * m / 2.0 - t * m * m / (2.0 * tau_h) + m * m * m / (3.0 * tau_h);
    }
    case EnsembleKind::PoissonSpectrum:
        return 0.0;
    case EnsembleKind::PicketFence: {
        // b2 = 1 - sum_{k != 0} delta(tau - k): the comb revivals at multiples of tau_h.
        double c = t * t / 2.0;
        for (double k = 1.0; k * tau_h <= t; k += 1.0) {
            c -= tau_h * (t - k * tau_h);
        }
        return c;
    }
    case EnsembleKind::GOE:
        break;
    }
    throw ConfigError("correlation_integral: no closed form for GOE; pass an empirical b2");
}

} // namespace detail

/*
 * Double time integral of b2((tau - tau')/tau_h) over [0, t]. GUE uses the
 * exact b2; a Poisson spectrum has b2 = 0; the picket fence has a comb of
 * delta revivals at multiples of tau_h, integrated in closed form.
 */
inline double correlation_integral(double t, double tau_h, EnsembleKind h0_kind,
                                   CorrelationConvention convention = CorrelationConvention::Triangle)
{
    require(t >= 0.0, "correlation_integral: t must be nonnegative");
    require(tau_h > 0.0, "correlation_integral: tau_h must be positive");
    const double tri = detail::triangle_correlation_integral(t, tau_h, h0_kind);
    return convention == CorrelationConvention::Square ? 2.0 * tri : tri;
}

/// Same integral for a tabulated or model b2(tau), evaluated by quadrature.
inline double correlation_integral(double t, double tau_h, const std::function<double(double)>& b2,
                                   CorrelationConvention convention = CorrelationConvention::Triangle)
{
    require(t >= 0.0, "correlation_integral: t must be nonnegative");
    require(tau_h > 0.0, "correlation_integral: tau_h must be positive");
    auto integrand = [&](double s) { return (t - s) * b2(s / tau_h); };
    double tri = 0.0;
    // Split at tau_h where ensemble form factors have derivative jumps.
    if (t > tau_h) {
        tri = integrate(integrand, 0.0, tau_h, 1e-10, 1e-14).value + integrate(integrand, tau_h, t, 1e-10, 1e-14).value;
    } else {
        tri = integrate(integrand, 0.0, t, 1e-10, 1e-14).value;
    }
    return convention == CorrelationConvention::Square ? 2.0 * tri : tri;
}

/*
 * Empirical b2 from sampled unit-spacing spectra: b2(tau) = 1 - <K2(tau)> for
 * tau > 0, with <K2> averaged over a window of the given width.
 */
inline double empirical_b2(const std::vector<std::vector<double>>& spectra, double tau, double width)
{
    return 1.0 - form_factor_window(spectra, tau, width).value;
}

} // namespace echo_rmt
