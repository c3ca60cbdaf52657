#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "echo_rmt/common.hpp"

namespace echo_rmt {

/// Ensemble from which the unperturbed Hamiltonian (or its spectrum) is drawn.
enum class EnsembleKind { GOE, GUE, PoissonSpectrum, PicketFence };

/// Ensemble from which the perturbation / coupling is drawn.
enum class PerturbationKind { FullGOE, FullGUE, ZeroDiagonalGUE, ImaginaryAntisymmetric };

using MatrixClass = std::variant<EnsembleKind, PerturbationKind>;

inline std::string_view to_string(EnsembleKind kind)
{
    switch (kind) {
    case EnsembleKind::GOE: return "goe";
    case EnsembleKind::GUE: return "gue";
    case EnsembleKind::PoissonSpectrum: return "poisson";
    case EnsembleKind::PicketFence: return "picket";
    }
    return "?";
}

inline std::string_view to_string(PerturbationKind kind)
{
    switch (kind) {
    case PerturbationKind::FullGOE: return "goe";
    case PerturbationKind::FullGUE: return "gue";
    case PerturbationKind::ZeroDiagonalGUE: return "gue-zero-diagonal";
    case PerturbationKind::ImaginaryAntisymmetric: return "imaginary-antisymmetric";
    }
    return "?";
}

inline EnsembleKind parse_ensemble_kind(std::string_view name)
{
    for (auto k : {EnsembleKind::GOE, EnsembleKind::GUE, EnsembleKind::PoissonSpectrum, EnsembleKind::PicketFence}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown ensemble kind '" + std::string(name) + "'");
}

inline PerturbationKind parse_perturbation_kind(std::string_view name)
{
    for (auto k : {PerturbationKind::FullGOE, PerturbationKind::FullGUE, PerturbationKind::ZeroDiagonalGUE,
                   PerturbationKind::ImaginaryAntisymmetric}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown perturbation kind '" + std::string(name) + "'");
}

/// Symmetry index beta_V of a perturbation ensemble (1 real, 2 complex).
inline int perturbation_beta(PerturbationKind kind)
{
    return kind == PerturbationKind::FullGOE ? 1 : 2;
}

/// Dense Hermitian operator tagged with the ensemble it was drawn from.
struct HermitianMatrix {
    Matrix entries;
    MatrixClass matrix_class;

    [[nodiscard]] Index dim() const { return entries.rows(); }
};

/// Spectrum rescaled to unit mean spacing.
struct UnfoldedSpectrum {
    std::vector<double> levels;
    double tau_h = kUnfoldedHeisenbergTime;
    /// Eigenvalues found outside the semicircle support and clamped to its edge.
    std::size_t clamped = 0;
};

namespace detail {

/// Complex entry (x + iy)/sqrt(2) with x, y ~ N(0,1), so <|z|^2> = 1.
template <class Rng>
Complex unit_complex_gaussian(Rng& rng, std::normal_distribution<double>& normal)
{
    const double x = normal(rng);
    const double y = normal(rng);
    return {x * kInvSqrt2, y * kInvSqrt2};
}

template <class Rng>
Matrix sample_gue(Index n, Rng& rng)
{
    std::normal_distribution<double> normal;
    Matrix h(n, n);
    for (Index i = 0; i < n; ++i) {
        h(i, i) = Complex(normal(rng), 0.0);
        for (Index j = i + 1; j < n; ++j) {
            const Complex z = unit_complex_gaussian(rng, normal);
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    }
    return h;
}

template <class Rng>
RealMatrix sample_goe_real(Index n, Rng& rng)
{
    std::normal_distribution<double> normal;
    RealMatrix h(n, n);
    for (Index i = 0; i < n; ++i) {
        h(i, i) = std::numbers::sqrt2 * normal(rng);
        for (Index j = i + 1; j < n; ++j) {
            const double x = normal(rng);
            h(i, j) = x;
            h(j, i) = x;
        }
    }
    return h;
}

inline void require_dimension(Index n)
{
    require(n >= 2, "matrix dimension must be at least 2 (got " + std::to_string(n) + ")");
}

} // namespace detail

/*
 * Samples H from the GOE or GUE.
 *
 * GUE: real N(0,1) diagonal, off-diagonal (x + iy)/sqrt(2), so <|H_ij|^2> = 1.
 * GOE: real symmetric, off-diagonal N(0,1), diagonal N(0,2).
 * Both have semicircle support [-2 sqrt(n), 2 sqrt(n)].
 */
template <class Rng>
HermitianMatrix sample_hamiltonian(EnsembleKind kind, Index n, Rng& rng)
{
    detail::require_dimension(n);
    switch (kind) {
    case EnsembleKind::GUE:
        return {detail::sample_gue(n, rng), kind};
    case EnsembleKind::GOE:
        return {detail::sample_goe_real(n, rng).template cast<Complex>(), kind};
    default:
        throw ConfigError("sample_hamiltonian: " + std::string(to_string(kind))
                          + " defines a spectrum only; use sample_spectrum");
    }
}

/// Samples a perturbation V with off-diagonal <|V_ij|^2> = 1.
template <class Rng>
HermitianMatrix sample_perturbation(PerturbationKind kind, Index n, Rng& rng)
{
    detail::require_dimension(n);
    switch (kind) {
    case PerturbationKind::FullGUE:
        return {detail::sample_gue(n, rng), kind};
    case PerturbationKind::FullGOE:
        return {detail::sample_goe_real(n, rng).template cast<Complex>(), kind};
    case PerturbationKind::ZeroDiagonalGUE: {
        Matrix v = detail::sample_gue(n, rng);
        v.diagonal().setZero();
        return {std::move(v), kind};
    }
    case PerturbationKind::ImaginaryAntisymmetric: {
        // V = i (A - A^T) / sqrt(2), A real iid N(0,1).
        std::normal_distribution<double> normal;
        Matrix v = Matrix::Zero(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const double first = normal(rng);
                const double second = normal(rng);
                const double a = (first - second) * kInvSqrt2;
                v(i, j) = Complex(0.0, a);
                v(j, i) = Complex(0.0, -a);
            }
        }
        return {std::move(v), kind};
    }
    }
    throw ConfigError("sample_perturbation: unknown kind");
}

/// Poisson (iid uniform on [0, n]) or picket-fence (i + 1/2) spectrum.
template <class Rng>
UnfoldedSpectrum sample_spectrum(EnsembleKind kind, Index n, Rng& rng)
{
    require(n >= 1, "sample_spectrum: n must be positive");
    UnfoldedSpectrum out;
    out.levels.resize(static_cast<std::size_t>(n));
    switch (kind) {
    case EnsembleKind::PoissonSpectrum: {
        std::uniform_real_distribution<double> uniform(0.0, static_cast<double>(n));
        for (auto& e : out.levels) {
            e = uniform(rng);
        }
        std::sort(out.levels.begin(), out.levels.end());
        return out;
    }
    case EnsembleKind::PicketFence:
        for (std::size_t i = 0; i < out.levels.size(); ++i) {
            out.levels[i] = static_cast<double>(i) + 0.5;
        }
        return out;
    default:
        throw ConfigError("sample_spectrum: " + std::string(to_string(kind))
                          + " is a matrix ensemble; use sample_hamiltonian");
    }
}

/// Cumulative semicircle distribution for radius R = 2 sqrt(n).
inline double semicircle_cdf(double e, double n)
{
    const double radius = 2.0 * std::sqrt(n);
    const double x = std::clamp(e / radius, -1.0, 1.0);
    return 0.5 + (x * std::sqrt(1.0 - x * x) + std::asin(x)) / kPi;
}

/*
 * Maps eigenvalues of an n x n GOE/GUE sample to unit mean spacing through
 * e_i = n G(E_i), G the semicircle CDF. Values outside the support are clamped
 * to its edge and counted.
 */
inline UnfoldedSpectrum semicircle_unfold(std::span<const double> eigs, Index n)
{
    require(n >= 1, "semicircle_unfold: n must be positive");
    const double nn = static_cast<double>(n);
    const double radius = 2.0 * std::sqrt(nn);
    UnfoldedSpectrum out;
    out.levels.reserve(eigs.size());
    for (double e : eigs) {
        if (std::abs(e) > radius) {
            ++out.clamped;
        }
        out.levels.push_back(nn * semicircle_cdf(e, nn));
    }
    return out;
}

/// Index range [first, first + count) of the central `fraction` of `n` levels.
inline std::pair<std::size_t, std::size_t> central_band_range(std::size_t n, double fraction)
{
    require(fraction > 0.0 && fraction <= 1.0, "band fraction must lie in (0, 1]");
    const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n))));
    return {(n - std::min(count, n)) / 2, std::min(count, n)};
}

inline std::vector<double> central_band(const UnfoldedSpectrum& spectrum, double fraction)
{
    const auto [first, count] = central_band_range(spectrum.levels.size(), fraction);
    return {spectrum.levels.begin() + static_cast<std::ptrdiff_t>(first),
            spectrum.levels.begin() + static_cast<std::ptrdiff_t>(first + count)};
}

/// Eigenvalues of a GOE/GUE sample, ascending.
template <class Rng>
std::vector<double> sample_eigenvalues(EnsembleKind kind, Index n, Rng& rng)
{
    RealVector eigs;
    if (kind == EnsembleKind::GOE) {
        detail::require_dimension(n);
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver(detail::sample_goe_real(n, rng), Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("eigenvalue solver failed on GOE sample");
        }
        eigs = solver.eigenvalues();
    } else {
        const HermitianMatrix h = sample_hamiltonian(kind, n, rng);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h.entries, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("eigenvalue solver failed on GUE sample");
        }
        eigs = solver.eigenvalues();
    }
    return {eigs.data(), eigs.data() + eigs.size()};
}

/// Unit-spacing spectrum for any ensemble kind: sampled + unfolded for GOE/GUE, direct otherwise.
template <class Rng>
UnfoldedSpectrum sample_unfolded_levels(EnsembleKind kind, Index n, Rng& rng)
{
    if (kind == EnsembleKind::GOE || kind == EnsembleKind::GUE) {
        const auto eigs = sample_eigenvalues(kind, n, rng);
        return semicircle_unfold(eigs, n);
    }
    return sample_spectrum(kind, n, rng);
}

} // namespace echo_rmt
