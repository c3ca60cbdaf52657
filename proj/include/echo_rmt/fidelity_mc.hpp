#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "echo_rmt/common.hpp"
#include "echo_rmt/ensembles.hpp"
#include "echo_rmt/random_streams.hpp"
#include "echo_rmt/spectral_decomposition.hpp"
#include "echo_rmt/statistics.hpp"

namespace echo_rmt {

/// Full specification of a fidelity Monte Carlo campaign.
struct EchoRunConfig {
    Index n = 256;
    EnsembleKind h0_kind = EnsembleKind::GUE;
    PerturbationKind v_kind = PerturbationKind::FullGUE;
    /// Perturbation strength in unit-spacing units (tau_H = 2 pi).
    double epsilon = 0.0;
    /// Times in units of the Heisenberg time.
    std::vector<double> time_grid;
    int n_realizations = 1;
    int n_states_per_realization = 1;
    /// Central fraction of the unfolded H0 levels kept for V.
    double band = 0.5;
    /*
     * Central fraction of that band on which the random initial states live.
     * Levels near the band edges acquire second-order shifts eps^2 ln(x/(m-x))
     * that dephase a state spread over the whole band.
     */
    double state_band = 0.5;
    std::uint64_t master_seed = 0;

    void validate() const
    {
        require(n >= 2, "fidelity run: n must be at least 2");
        require(epsilon >= 0.0 && std::isfinite(epsilon), "fidelity run: epsilon must be finite and nonnegative");
        require(!time_grid.empty(), "fidelity run: empty time grid");
        for (std::size_t i = 0; i < time_grid.size(); ++i) {
            require(time_grid[i] >= 0.0, "fidelity run: times must be nonnegative");
            require(i == 0 || time_grid[i] > time_grid[i - 1], "fidelity run: time grid must be strictly increasing");
        }
        require(n_realizations >= 1, "fidelity run: need at least one realization");
        require(n_states_per_realization >= 1, "fidelity run: need at least one state per realization");
        require(band > 0.0 && band <= 1.0, "fidelity run: band must lie in (0, 1]");
        require(state_band > 0.0 && state_band <= 1.0, "fidelity run: state_band must lie in (0, 1]");
        const auto count = central_band_range(static_cast<std::size_t>(n), band).second;
        require(count >= 2, "fidelity run: band keeps fewer than two levels");
    }
};

/*
 * Ensemble means and standard errors of f(t) and F(t) = |f(t)|^2. With two or
 * more realizations the errors are taken over realization means, since the
 * states of one realization share H_eps.
 */
struct FidelitySeries {
    std::vector<double> t_over_tau_h;
    std::vector<double> mean_re_f;
    std::vector<double> mean_im_f;
    std::vector<double> stderr_re_f;
    std::vector<double> stderr_im_f;
    std::vector<double> mean_F;
    std::vector<double> stderr_F;
    std::size_t n_samples = 0;

    [[nodiscard]] std::size_t size() const { return t_over_tau_h.size(); }
    [[nodiscard]] double abs_mean_f(std::size_t k) const { return std::hypot(mean_re_f[k], mean_im_f[k]); }
};

/// Inverse participation ratio sum |psi_nu|^4 of a unit vector.
inline double ipr(const Vector& psi)
{
    return psi.cwiseAbs2().cwiseAbs2().sum();
}

/// <F> = |<f>|^2 + eps^2 (2/beta_V) ipr t^2, the second-order relation between F and f.
inline double predict_F(Complex mean_f, double epsilon, int beta_v, double ipr_value, double t)
{
    require(beta_v == 1 || beta_v == 2, "predict_F: beta_V must be 1 or 2");
    require(t >= 0.0, "predict_F: t must be nonnegative");
    return std::norm(mean_f) + epsilon * epsilon * (2.0 / beta_v) * ipr_value * t * t;
}

/*
 * f(t) = <psi| exp(+i H0 t) exp(-i H_eps t) |psi>, with H0 = diag(h0_levels)
 * and H_eps given through its spectral decomposition in the same basis.
 */
inline Complex echo_amplitude(std::span<const double> h0_levels, const SpectralDecomposition& h_eps,
                              const Vector& psi, double t)
{
    const auto n = static_cast<Index>(h0_levels.size());
    require(h_eps.dim() == n && psi.size() == n, "echo_amplitude: dimension mismatch");
    require(std::abs(psi.norm() - 1.0) <= 1e-12, "echo_amplitude: initial state is not normalized");
    if (t == 0.0) {
        return {1.0, 0.0};
    }
    const Vector forward = h_eps.propagate(psi, t);
    Complex f{0.0, 0.0};
    for (Index i = 0; i < n; ++i) {
        f += std::conj(psi(i)) * std::polar(1.0, h0_levels[static_cast<std::size_t>(i)] * t) * forward(i);
    }
    return f;
}

/// Complex Gaussian random vector of unit norm (Haar-distributed direction).
template <class Rng>
Vector random_state(Index n, Rng& rng)
{
    std::normal_distribution<double> normal;
    Vector psi(n);
    for (Index i = 0; i < n; ++i) {
        const double x = normal(rng);
        const double y = normal(rng);
        psi(i) = Complex(x, y);
    }
    psi /= psi.norm();
    return psi;
}

namespace detail {

struct EchoPartial {
    MomentSums re, im, fid;
};

inline constexpr std::uint64_t kFidelityStreamSalt = 0xF1DE1177ULL;

inline EchoPartial run_echo_realization(const EchoRunConfig& cfg, std::size_t k)
{
    const std::size_t nt = cfg.time_grid.size();
    const auto n_states = static_cast<std::size_t>(cfg.n_states_per_realization);
    EchoPartial out{MomentSums(nt, n_states), MomentSums(nt, n_states), MomentSums(nt, n_states)};
    Engine rng = derive_stream(cfg.master_seed, k, kFidelityStreamSalt);

    const UnfoldedSpectrum spectrum = sample_unfolded_levels(cfg.h0_kind, cfg.n, rng);
    std::vector<double> levels = central_band(spectrum, cfg.band);
    // A global shift of H0 and H_eps cancels in the echo; centring keeps phases small.
    const double centre = 0.5 * (levels.front() + levels.back());
    for (auto& e : levels) {
        e -= centre;
    }
    const auto m = static_cast<Index>(levels.size());
    const auto states = static_cast<Index>(cfg.n_states_per_realization);

    if (cfg.epsilon == 0.0) {
        for (Index s = 0; s < states; ++s) {
            for (std::size_t j = 0; j < nt; ++j) {
                out.re.add(j, 1.0);
                out.im.add(j, 0.0);
                out.fid.add(j, 1.0);
            }
        }
        return out;
    }

    const HermitianMatrix v = sample_perturbation(cfg.v_kind, m, rng);
    Matrix h = cfg.epsilon * v.entries;
    for (Index i = 0; i < m; ++i) {
        h(i, i) += levels[static_cast<std::size_t>(i)];
    }
    const SpectralDecomposition dec = decompose(h, "H_eps of realization " + std::to_string(k));

    const auto [state_first, state_count] = central_band_range(static_cast<std::size_t>(m), cfg.state_band);
    Matrix psi = Matrix::Zero(m, states);
    for (Index s = 0; s < states; ++s) {
        psi.col(s).segment(static_cast<Index>(state_first), static_cast<Index>(state_count))
            = random_state(static_cast<Index>(state_count), rng);
    }
    const Matrix coeffs = dec.eigenvectors.adjoint() * psi;

    // Phased eigen-coefficients for every (state, time) pair, propagated with one product.
    const auto nt_i = static_cast<Index>(nt);
    Matrix phased(m, states * nt_i);
    for (Index j = 0; j < nt_i; ++j) {
        const double t = cfg.time_grid[static_cast<std::size_t>(j)] * kUnfoldedHeisenbergTime;
        for (Index a = 0; a < m; ++a) {
            const Complex phase = std::polar(1.0, -dec.eigenvalues(a) * t);
            for (Index s = 0; s < states; ++s) {
                phased(a, j * states + s) = phase * coeffs(a, s);
            }
        }
    }
    const Matrix forward = dec.eigenvectors * phased;

    for (Index j = 0; j < nt_i; ++j) {
        const double t = cfg.time_grid[static_cast<std::size_t>(j)] * kUnfoldedHeisenbergTime;
        for (Index s = 0; s < states; ++s) {
            Complex f{1.0, 0.0};
            if (t != 0.0) {
                f = Complex{0.0, 0.0};
                for (Index i = 0; i < m; ++i) {
                    f += std::conj(psi(i, s)) * std::polar(1.0, levels[static_cast<std::size_t>(i)] * t)
                         * forward(i, j * states + s);
                }
            }
            out.re.add(static_cast<std::size_t>(j), f.real());
            out.im.add(static_cast<std::size_t>(j), f.imag());
            out.fid.add(static_cast<std::size_t>(j), std::norm(f));
        }
    }
    return out;
}

} // namespace detail

/*
 * Monte Carlo estimate of <f(t)> and <F(t)>.
 *
 * Each realization k draws its own stream from (master_seed, k): an unfolded
 * H0 spectrum restricted to the central band, a perturbation V of band size
 * sampled directly in the H0 eigenbasis, and random states supported on the
 * band. H_eps = diag(e) + eps V is diagonalized once per realization.
 * Partial sums are reduced in realization order, so the result does not depend
 * on `workers`.
 */
inline FidelitySeries run_fidelity_mc(const EchoRunConfig& cfg, unsigned workers = 1)
{
    cfg.validate();
    const std::size_t nt = cfg.time_grid.size();
    const auto nr = static_cast<std::size_t>(cfg.n_realizations);
    std::vector<detail::EchoPartial> partials(nr);
    parallel_for(nr, workers, [&](std::size_t k) { partials[k] = detail::run_echo_realization(cfg, k); });

    ClusteredMoments re(nt), im(nt), fid(nt);
    for (const auto& p : partials) {
        re.add_cluster(p.re);
        im.add_cluster(p.im);
        fid.add_cluster(p.fid);
    }
    FidelitySeries out;
    out.t_over_tau_h = cfg.time_grid;
    out.n_samples = nr * static_cast<std::size_t>(cfg.n_states_per_realization);
    re.finish(out.mean_re_f, out.stderr_re_f);
    im.finish(out.mean_im_f, out.stderr_im_f);
    fid.finish(out.mean_F, out.stderr_F);
    for (std::size_t k = 0; k < nt; ++k) {
        if (cfg.time_grid[k] == 0.0) {
            out.mean_re_f[k] = 1.0;
            out.mean_im_f[k] = 0.0;
            out.mean_F[k] = 1.0;
            out.stderr_re_f[k] = out.stderr_im_f[k] = out.stderr_F[k] = 0.0;
        }
    }
    return out;
}

} // namespace echo_rmt
