#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "echo_rmt/common.hpp"
#include "echo_rmt/concurrence_cp.hpp"
#include "echo_rmt/density_matrix.hpp"
#include "echo_rmt/ensembles.hpp"
#include "echo_rmt/fidelity_mc.hpp"
#include "echo_rmt/quadrature.hpp"
#include "echo_rmt/random_streams.hpp"
#include "echo_rmt/spectral_decomposition.hpp"
#include "echo_rmt/spectral_stats.hpp"
#include "echo_rmt/statistics.hpp"

namespace echo_rmt {

// ---------------------------------------------------------------------------
// Initial state and geometric factors

struct InitialStateParams {
    double theta1 = 0.0;
    double theta2 = 0.0;
};

inline void validate_angles(double theta1, double theta2)
{
    constexpr double slack = 1e-12;
    require(theta1 >= -slack && theta1 <= kPi / 4.0 + slack, "theta1 must lie in [0, pi/4]");
    require(theta2 >= -slack && theta2 <= kPi / 2.0 + slack, "theta2 must lie in [0, pi/2]");
}

/*
 * cos(t1) (cos(t2)|0> + sin(t2)|1>)|0> + sin(t1) (sin(t2)|0> - cos(t2)|1>)|1>,
 * first factor the coupled qubit, second the spectator; basis index 2q + s.
 */
inline Eigen::Vector4cd initial_central_state(double theta1, double theta2)
{
    validate_angles(theta1, theta2);
    const double c1 = std::cos(theta1), s1 = std::sin(theta1);
    const double c2 = std::cos(theta2), s2 = std::sin(theta2);
    Eigen::Vector4cd a;
    a << c1 * c2, s1 * s2, c1 * s2, -s1 * c2;
    return a;
}

inline Eigen::Vector4cd initial_central_state(const InitialStateParams& p)
{
    return initial_central_state(p.theta1, p.theta2);
}

/// g(theta) = cos^4 + sin^4, the purity of either qubit of the Schmidt state.
inline double g_theta(double theta)
{
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    return c2 * c2 + s2 * s2;
}

inline double g1(double theta1, double theta2)
{
    const double a = g_theta(theta1);
    const double b = g_theta(theta2);
    return a * (1.0 - b) + b * (1.0 - a);
}

inline double g2(double theta1, double theta2)
{
    const double a = g_theta(theta1);
    const double b = g_theta(theta2);
    return 2.0 * (1.0 - a) - b * (1.0 - 2.0 * a);
}

// ---------------------------------------------------------------------------
// Linear response

/*
 * BornConsistent counts the delta term of the coupling correlator in full,
 * which is what the second-order expansion gives and what the Monte Carlo
 * reproduces; AsPrinted uses the r(t) and half-delta weights exactly as they
 * are usually quoted (linear terms half as large).
 */
enum class PurityConvention { BornConsistent, AsPrinted };

enum class PurityRegime { General, Degenerate, Fast };

inline std::string_view to_string(PurityConvention c)
{
    return c == PurityConvention::BornConsistent ? "born" : "printed";
}

inline PurityConvention parse_purity_convention(std::string_view name)
{
    if (name == "born") {
        return PurityConvention::BornConsistent;
    }
    if (name == "printed") {
        return PurityConvention::AsPrinted;
    }
    throw ConfigError("unknown purity convention '" + std::string(name) + "'");
}

inline std::string_view to_string(PurityRegime r)
{
    switch (r) {
    case PurityRegime::General: return "general";
    case PurityRegime::Degenerate: return "degenerate";
    case PurityRegime::Fast: return "fast";
    }
    return "?";
}

inline PurityRegime parse_purity_regime(std::string_view name)
{
    for (auto r : {PurityRegime::General, PurityRegime::Degenerate, PurityRegime::Fast}) {
        if (name == to_string(r)) {
            return r;
        }
    }
    throw ConfigError("unknown purity regime '" + std::string(name) + "'");
}

/*
 * r(t) = c t max{t, tau_H} + (2/(3 tau_H)) min{t, tau_H}^3 with c = 2
 * (BornConsistent) or c = 1 (AsPrinted).
 */
inline double r_function(double t, double tau_h, PurityConvention convention = PurityConvention::BornConsistent)
{
    require(t >= 0.0, "r_function: t must be nonnegative");
    require(tau_h > 0.0, "r_function: tau_h must be positive");
    const double c = convention == PurityConvention::BornConsistent ? 2.0 : 1.0;
    const double m = std::min(t, tau_h);
    return c * t * std::max(t, tau_h) + 2.0 / (3.0 * tau_h) * m * m * m;
}

namespace detail {

/// integral_0^t (t - s)(1 - b2(s/tau_h))(g1 + g2 cos(delta s)) ds for a GUE environment.
inline double purity_correlation_integral(double t, double tau_h, double delta, double ga, double gb)
{
    auto f = [&](double s) { return (t - s) * (1.0 - b2_gue(s / tau_h)) * (ga + gb * std::cos(delta * s)); };
    std::vector<double> cuts{0.0};
    double chunk = tau_h;
    if (delta != 0.0) {
        chunk = std::min(chunk, 4.0 * kPi / std::abs(delta));
    }
    for (double x = chunk; x < t; x += chunk) {
        cuts.push_back(x);
    }
    if (tau_h < t) {
        cuts.push_back(tau_h);
    }
    cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = 0.0;
    const double floor = 1e-15 * std::max(1.0, t * t);
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        acc += integrate(f, cuts[i - 1], cuts[i], 1e-11, floor).value;
    }
    return acc;
}

} // namespace detail

/*
 * Linear-response purity of the spectator configuration (GUE environment and
 * coupling, unit level spacing, Heisenberg time tau_h).
 *   Degenerate: 1 - lambda^2 (2 - g(theta1)) r(t)
 *   Fast:       1 - lambda^2 [g1 r(t) + 2 tau_H g2 t]
 *   General:    1 - k lambda^2 [tau_H t (g1 + g2)/2 + int_0^t (t-s)(1 - b2)(g1 + g2 cos(Delta s)) ds]
 * with k = 4 (BornConsistent) or k = 2 (AsPrinted).
 */
inline double lr_purity(double theta1, double theta2, double lambda, double delta, double t, double tau_h,
                        PurityRegime regime, PurityConvention convention = PurityConvention::BornConsistent)
{
    validate_angles(theta1, theta2);
    require(t >= 0.0, "lr_purity: t must be nonnegative");
    require(tau_h > 0.0, "lr_purity: tau_h must be positive");
    const double l2 = lambda * lambda;
    const double ga = g1(theta1, theta2);
    const double gb = g2(theta1, theta2);
    switch (regime) {
    case PurityRegime::Degenerate:
        return 1.0 - l2 * (2.0 - g_theta(theta1)) * r_function(t, tau_h, convention);
    case PurityRegime::Fast:
        return 1.0 - l2 * (ga * r_function(t, tau_h, convention) + 2.0 * tau_h * gb * t);
    case PurityRegime::General: {
        const double k = convention == PurityConvention::BornConsistent ? 4.0 : 2.0;
        const double bracket = tau_h * t * (ga + gb) / 2.0
                               + detail::purity_correlation_integral(t, tau_h, delta, ga, gb);
        return 1.0 - k * l2 * bracket;
    }
    }
    throw ConfigError("lr_purity: unknown regime");
}

/// Purity after complete depolarization of the coupled qubit, g(theta1)/2.
inline double p_infinity(double theta1)
{
    return g_theta(theta1) / 2.0;
}

/// P_inf + (1 - P_inf) exp[-(1 - P_LR)/(1 - P_inf)].
inline double elr_purity(double p_lr_value, double p_inf)
{
    require(p_lr_value <= 1.0 + 1e-12, "elr_purity: linear-response purity exceeds 1");
    require(p_inf > 0.0 && p_inf < 1.0, "elr_purity: P_inf must lie in (0, 1)");
    return p_inf + (1.0 - p_inf) * std::exp(-(1.0 - p_lr_value) / (1.0 - p_inf));
}

// ---------------------------------------------------------------------------
// Monte Carlo

/// Spectator: one qubit coupled, one idle. BothQubits: independent couplings of equal lambda on each.
enum class CouplingLayout { Spectator, BothQubits };

inline std::string_view to_string(CouplingLayout l)
{
    return l == CouplingLayout::Spectator ? "spectator" : "both";
}

inline CouplingLayout parse_coupling_layout(std::string_view name)
{
    if (name == "spectator") {
        return CouplingLayout::Spectator;
    }
    if (name == "both") {
        return CouplingLayout::BothQubits;
    }
    throw ConfigError("unknown coupling layout '" + std::string(name) + "'");
}

struct SpectatorConfig {
    Index n_env = 256;
    /// Qubit level splitting in units of the unfolded environment spacing.
    double delta = 0.0;
    double lambda = 0.0;
    EnsembleKind env_kind = EnsembleKind::GUE;
    PerturbationKind coupling_kind = PerturbationKind::FullGUE;
    double theta1 = 0.0;
    double theta2 = 0.0;
    /// Times in units of the Heisenberg time.
    std::vector<double> time_grid;
    int n_realizations = 1;
    int n_states = 1;
    std::uint64_t master_seed = 0;
    CouplingLayout layout = CouplingLayout::Spectator;
    /// The environment levels are the central n_env of a ceil(n_env / env_band) spectrum.
    double env_band = 0.5;
    /// Keep every (P, C) observation per time point.
    bool record_samples = false;

    void validate() const
    {
        require(n_env >= 2, "purity run: n_env must be at least 2");
        require(std::isfinite(delta), "purity run: delta must be finite");
        require(lambda >= 0.0 && std::isfinite(lambda), "purity run: lambda must be finite and nonnegative");
        validate_angles(theta1, theta2);
        require(!time_grid.empty(), "purity run: empty time grid");
        for (std::size_t i = 0; i < time_grid.size(); ++i) {
            require(time_grid[i] >= 0.0, "purity run: times must be nonnegative");
            require(i == 0 || time_grid[i] > time_grid[i - 1], "purity run: time grid must be strictly increasing");
        }
        require(n_realizations >= 1, "purity run: need at least one realization");
        require(n_states >= 1, "purity run: need at least one state per realization");
        require(env_band > 0.0 && env_band <= 1.0, "purity run: env_band must lie in (0, 1]");
    }

    /// Number of qubits sharing the environment coupling.
    [[nodiscard]] Index coupled_qubits() const { return layout == CouplingLayout::Spectator ? 1 : 2; }
    [[nodiscard]] Index coupled_dim() const { return n_env * (Index{1} << coupled_qubits()); }
};

/// Unperturbed diagonal and coupling operator on environment (x) coupled qubit(s).
struct SpectatorSystem {
    std::vector<double> env_levels;
    RealVector h0_diagonal;
    Matrix coupling;
};

/*
 * H0 = diag(e) (x) 1 + 1 (x) diag(Delta/2, -Delta/2) on index 2e + q; with both
 * qubits coupled the index is 4e + 2q1 + q2 and each qubit carries the splitting.
 * V is one GUE matrix on the 2 N_e space per coupled qubit, acting trivially on
 * the other qubit.
 */
template <class Rng>
SpectatorSystem build_spectator(const SpectatorConfig& cfg, Rng& rng)
{
    cfg.validate();
    const auto ne = static_cast<std::size_t>(cfg.n_env);
    const auto total = static_cast<Index>(std::ceil(static_cast<double>(ne) / cfg.env_band - 1e-9));
    const UnfoldedSpectrum spectrum = sample_unfolded_levels(cfg.env_kind, std::max<Index>(total, cfg.n_env), rng);
    const std::size_t first = (spectrum.levels.size() - ne) / 2;
    SpectatorSystem sys;
    sys.env_levels.assign(spectrum.levels.begin() + static_cast<std::ptrdiff_t>(first),
                          spectrum.levels.begin() + static_cast<std::ptrdiff_t>(first + ne));
    const double centre = 0.5 * (sys.env_levels.front() + sys.env_levels.back());
    for (auto& e : sys.env_levels) {
        e -= centre;
    }

    const Index dim = cfg.coupled_dim();
    const double half = cfg.delta / 2.0;
    sys.h0_diagonal.resize(dim);
    if (cfg.layout == CouplingLayout::Spectator) {
        for (std::size_t e = 0; e < ne; ++e) {
            const auto i = static_cast<Index>(2 * e);
            sys.h0_diagonal(i) = sys.env_levels[e] + half;
            sys.h0_diagonal(i + 1) = sys.env_levels[e] - half;
        }
        sys.coupling = sample_perturbation(cfg.coupling_kind, 2 * cfg.n_env, rng).entries;
        return sys;
    }

    for (std::size_t e = 0; e < ne; ++e) {
        for (Index q1 = 0; q1 < 2; ++q1) {
            for (Index q2 = 0; q2 < 2; ++q2) {
                const double s = (q1 == 0 ? half : -half) + (q2 == 0 ? half : -half);
                sys.h0_diagonal(static_cast<Index>(4 * e) + 2 * q1 + q2) = sys.env_levels[e] + s;
            }
        }
    }
    const Matrix v1 = sample_perturbation(cfg.coupling_kind, 2 * cfg.n_env, rng).entries;
    const Matrix v2 = sample_perturbation(cfg.coupling_kind, 2 * cfg.n_env, rng).entries;
    sys.coupling = Matrix::Zero(dim, dim);
    for (Index e = 0; e < cfg.n_env; ++e) {
        for (Index f = 0; f < cfg.n_env; ++f) {
            for (Index a = 0; a < 2; ++a) {
                for (Index b = 0; b < 2; ++b) {
                    for (Index other = 0; other < 2; ++other) {
                        // qubit 1 flips a -> b, qubit 2 idle
                        sys.coupling(4 * e + 2 * a + other, 4 * f + 2 * b + other) += v1(2 * e + a, 2 * f + b);
                        // qubit 2 flips a -> b, qubit 1 idle
                        sys.coupling(4 * e + 2 * other + a, 4 * f + 2 * other + b) += v2(2 * e + a, 2 * f + b);
                    }
                }
            }
        }
    }
    return sys;
}

/// Spectral decomposition of H0 + lambda V (exact diagonal form when lambda = 0).
inline SpectralDecomposition diagonalize_coupled(const SpectatorSystem& sys, double lambda,
                                                 const std::string& context = "coupled Hamiltonian")
{
    const Index dim = sys.h0_diagonal.size();
    if (lambda == 0.0) {
        return {sys.h0_diagonal, Matrix::Identity(dim, dim)};
    }
    Matrix h = lambda * sys.coupling;
    for (Index i = 0; i < dim; ++i) {
        h(i, i) += sys.h0_diagonal(i);
    }
    return decompose(h, context);
}

/*
 * Initial columns on the coupled space: one per spectator value s in the
 * spectator layout (psi_e (x) a_{q s}), a single column psi_e (x) a_{q1 q2}
 * with both qubits coupled.
 */
inline Matrix initial_columns(CouplingLayout layout, const Vector& psi_env, const Eigen::Vector4cd& a)
{
    const Index ne = psi_env.size();
    if (layout == CouplingLayout::Spectator) {
        Matrix cols(2 * ne, 2);
        for (Index e = 0; e < ne; ++e) {
            for (Index q = 0; q < 2; ++q) {
                for (Index s = 0; s < 2; ++s) {
                    cols(2 * e + q, s) = psi_env(e) * a(2 * q + s);
                }
            }
        }
        return cols;
    }
    Matrix col(4 * ne, 1);
    for (Index e = 0; e < ne; ++e) {
        for (Index j = 0; j < 4; ++j) {
            col(4 * e + j, 0) = psi_env(e) * a(j);
        }
    }
    return col;
}

/// Amplitudes M(e, 2q + s) of the full state from the evolved coupled-space columns.
inline Matrix central_amplitudes(CouplingLayout layout, const Matrix& evolved)
{
    if (layout == CouplingLayout::Spectator) {
        const Index ne = evolved.rows() / 2;
        Matrix m(ne, 4);
        for (Index e = 0; e < ne; ++e) {
            for (Index q = 0; q < 2; ++q) {
                for (Index s = 0; s < 2; ++s) {
                    m(e, 2 * q + s) = evolved(2 * e + q, s);
                }
            }
        }
        return m;
    }
    const Index ne = evolved.rows() / 4;
    Matrix m(ne, 4);
    for (Index e = 0; e < ne; ++e) {
        for (Index j = 0; j < 4; ++j) {
            m(e, j) = evolved(4 * e + j, 0);
        }
    }
    return m;
}

/// rho_ab = sum_e M(e, a) conj(M(e, b)): the environment traced out.
inline DensityMatrix4 reduced_central_state(const Matrix& amplitudes)
{
    require(amplitudes.cols() == 4, "reduced_central_state: need four central amplitudes per environment state");
    DensityMatrix4 rho;
    rho.entries = amplitudes.transpose() * amplitudes.conjugate();
    return rho;
}

/// Ensemble purity (and concurrence) time series; errors as in FidelitySeries.
struct PuritySeries {
    std::vector<double> t_over_tau_h;
    std::vector<double> mean_P;
    std::vector<double> stderr_P;
    std::vector<double> mean_C;
    std::vector<double> stderr_C;
    std::size_t n_samples = 0;
    /// Per time point, every (P, C) observation (only when requested).
    std::vector<std::vector<CPPoint>> samples;

    [[nodiscard]] std::size_t size() const { return t_over_tau_h.size(); }
};

/// Tolerance for trace and Hermiticity of evolved reduced states.
inline constexpr double kEvolvedStateTolerance = 1e-10;

namespace detail {

struct PurityPartial {
    MomentSums p, c;
    std::vector<std::vector<CPPoint>> samples;
};

inline constexpr std::uint64_t kPurityStreamSalt = 0x5EC7A704ULL;

inline PurityPartial run_purity_realization(const SpectatorConfig& cfg, std::size_t k)
{
    const std::size_t nt = cfg.time_grid.size();
    const auto n_states = static_cast<std::size_t>(cfg.n_states);
    PurityPartial out{MomentSums(nt, n_states), MomentSums(nt, n_states), {}};
    if (cfg.record_samples) {
        out.samples.resize(nt);
    }
    Engine rng = derive_stream(cfg.master_seed, k, kPurityStreamSalt);
    const SpectatorSystem sys = build_spectator(cfg, rng);
    const SpectralDecomposition dec = diagonalize_coupled(sys, cfg.lambda, "H_lambda of realization " + std::to_string(k));

    const Eigen::Vector4cd a = initial_central_state(cfg.theta1, cfg.theta2);
    const Index cols_per_state = cfg.layout == CouplingLayout::Spectator ? 2 : 1;
    const auto states = static_cast<Index>(cfg.n_states);
    const Index dim = dec.dim();
    Matrix init(dim, states * cols_per_state);
    for (Index s = 0; s < states; ++s) {
        const Vector psi_env = random_state(cfg.n_env, rng);
        init.middleCols(s * cols_per_state, cols_per_state) = initial_columns(cfg.layout, psi_env, a);
    }
    const Matrix coeffs = dec.eigenvectors.adjoint() * init;
    const Index width = coeffs.cols();
    const auto nt_i = static_cast<Index>(nt);
    Matrix phased(dim, width * nt_i);
    for (Index j = 0; j < nt_i; ++j) {
        const double t = cfg.time_grid[static_cast<std::size_t>(j)] * kUnfoldedHeisenbergTime;
        for (Index i = 0; i < dim; ++i) {
            const Complex phase = std::polar(1.0, -dec.eigenvalues(i) * t);
            for (Index c = 0; c < width; ++c) {
                phased(i, j * width + c) = phase * coeffs(i, c);
            }
        }
    }
    const Matrix evolved = dec.eigenvectors * phased;

    for (Index j = 0; j < nt_i; ++j) {
        for (Index s = 0; s < states; ++s) {
            const Matrix m = central_amplitudes(cfg.layout, evolved.middleCols(j * width + s * cols_per_state, cols_per_state));
            const DensityMatrix4 rho = reduced_central_state(m);
            validate_density(rho, kEvolvedStateTolerance);
            const double p = purity(rho);
            const double c = concurrence(rho);
            out.p.add(static_cast<std::size_t>(j), p);
            out.c.add(static_cast<std::size_t>(j), c);
            if (cfg.record_samples) {
                out.samples[static_cast<std::size_t>(j)].push_back({p, c});
            }
        }
    }
    return out;
}

} // namespace detail

/*
 * Monte Carlo purity of the central two-qubit state. Realization k draws its
 * stream from (master_seed, k); partial sums are reduced in realization order,
 * so the result does not depend on `workers`. Forward evolution is used: the
 * echo differs by a local unitary on the qubits, which leaves P and C unchanged.
 */
inline PuritySeries run_purity_mc(const SpectatorConfig& cfg, unsigned workers = 1)
{
    cfg.validate();
    const std::size_t nt = cfg.time_grid.size();
    const auto nr = static_cast<std::size_t>(cfg.n_realizations);
    std::vector<detail::PurityPartial> partials(nr);
    parallel_for(nr, workers, [&](std::size_t k) { partials[k] = detail::run_purity_realization(cfg, k); });

    ClusteredMoments p(nt), c(nt);
    PuritySeries out;
    if (cfg.record_samples) {
        out.samples.resize(nt);
    }
    for (auto& part : partials) {
        p.add_cluster(part.p);
        c.add_cluster(part.c);
        for (std::size_t j = 0; j < part.samples.size(); ++j) {
            out.samples[j].insert(out.samples[j].end(), part.samples[j].begin(), part.samples[j].end());
        }
    }
    out.t_over_tau_h = cfg.time_grid;
    out.n_samples = nr * static_cast<std::size_t>(cfg.n_states);
    p.finish(out.mean_P, out.stderr_P);
    c.finish(out.mean_C, out.stderr_C);
    for (std::size_t j = 0; j < nt; ++j) {
        if (cfg.time_grid[j] == 0.0) {
            out.mean_P[j] = 1.0;
            out.stderr_P[j] = 0.0;
        }
    }
    return out;
}

/// All (P, C) observations of a recorded run, pooled over time.
inline std::vector<CPPoint> pooled_samples(const PuritySeries& series)
{
    std::vector<CPPoint> all;
    for (const auto& at_t : series.samples) {
        all.insert(all.end(), at_t.begin(), at_t.end());
    }
    return all;
}

/*
 * Linear-response purity for a run configuration (General regime, GUE
 * environment), t in units of tau_H. With both qubits coupled the sum rule
 * adds one single-qubit deficit per qubit, which requires an initial state
 * symmetric under qubit exchange (theta1 = pi/4 or theta2 = 0).
 */
inline double lr_purity_for(const SpectatorConfig& cfg, double t_over_tau_h,
                            PurityConvention convention = PurityConvention::BornConsistent)
{
    const double tau_h = kUnfoldedHeisenbergTime;
    const double single = lr_purity(cfg.theta1, cfg.theta2, cfg.lambda, cfg.delta, t_over_tau_h * tau_h, tau_h,
                                    PurityRegime::General, convention);
    if (cfg.layout == CouplingLayout::Spectator) {
        return single;
    }
    require(std::abs(std::sin(cfg.theta2) * (std::cos(cfg.theta1) - std::sin(cfg.theta1))) < 1e-12,
            "lr_purity_for: both-qubit prediction needs an exchange-symmetric initial state");
    return 1.0 - 2.0 * (1.0 - single);
}

/// Long-time purity: the coupled qubit depolarized (spectator) or both qubits (1/4).
inline double p_infinity_for(const SpectatorConfig& cfg)
{
    return cfg.layout == CouplingLayout::Spectator ? p_infinity(cfg.theta1) : 0.25;
}

inline double elr_purity_for(const SpectatorConfig& cfg, double t_over_tau_h,
                             PurityConvention convention = PurityConvention::BornConsistent)
{
    return elr_purity(lr_purity_for(cfg, t_over_tau_h, convention), p_infinity_for(cfg));
}

/*
 * Sum rule for several independently coupled qubits:
 * P(t) = 1 - sum_i (1 - P_i(t)). Standard errors add in quadrature.
 */
inline PuritySeries sum_rule_combine(const std::vector<PuritySeries>& curves)
{
    require(!curves.empty(), "sum_rule_combine: no curves");
    const auto& grid = curves.front().t_over_tau_h;
    PuritySeries out;
    out.t_over_tau_h = grid;
    out.mean_P.assign(grid.size(), 1.0);
    out.stderr_P.assign(grid.size(), 0.0);
    for (const auto& c : curves) {
        require(c.t_over_tau_h == grid, "sum_rule_combine: curves are on different time grids");
        require(c.mean_P.size() == grid.size(), "sum_rule_combine: curve length does not match its grid");
        for (std::size_t j = 0; j < grid.size(); ++j) {
            out.mean_P[j] -= 1.0 - c.mean_P[j];
            if (j < c.stderr_P.size()) {
                out.stderr_P[j] += c.stderr_P[j] * c.stderr_P[j];
            }
        }
        out.n_samples = std::max(out.n_samples, c.n_samples);
    }
    for (auto& e : out.stderr_P) {
        e = std::sqrt(e);
    }
    return out;
}

} // namespace echo_rmt
