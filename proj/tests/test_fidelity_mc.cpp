#include <catch_amalgamated.hpp>

#include <cmath>

#include "echo_rmt/fidelity_mc.hpp"
#include "echo_rmt/fidelity_theory.hpp"

using namespace echo_rmt;
using Catch::Approx;

namespace {

EchoRunConfig small_config()
{
    EchoRunConfig cfg;
    cfg.n = 64;
    cfg.epsilon = 0.15;
    cfg.time_grid = {0.0, 0.25, 0.5, 1.0};
    cfg.n_realizations = 4;
    cfg.n_states_per_realization = 3;
    cfg.master_seed = 5;
    return cfg;
}

} // namespace

TEST_CASE("inverse participation ratio")
{
    Vector e = Vector::Zero(5);
    e(2) = 1.0;
    CHECK(ipr(e) == 1.0);
    const Vector uniform = Vector::Constant(8, Complex(1.0 / std::sqrt(8.0), 0.0));
    CHECK(ipr(uniform) == Approx(1.0 / 8.0).epsilon(1e-14));
    Vector two(2);
    two << std::sqrt(0.8), Complex(0.0, std::sqrt(0.2));
    CHECK(ipr(two) == Approx(0.68).epsilon(1e-14));
}

TEST_CASE("predicted F from f")
{
    CHECK(predict_F({1.0, 0.0}, 0.1, 2, 1.0, 1.0) == Approx(1.01).epsilon(1e-14));
    CHECK(predict_F({0.6, 0.3}, 0.0, 1, 0.5, 2.0) == Approx(0.45).epsilon(1e-14));
    CHECK(predict_F({0.6, 0.3}, 0.4, 2, 0.0, 2.0) == Approx(0.45).epsilon(1e-14));
    CHECK(predict_F({1.0, 0.0}, 0.1, 1, 1.0, 1.0) == Approx(1.02).epsilon(1e-14));
    CHECK_THROWS_AS(predict_F({1.0, 0.0}, 0.1, 4, 1.0, 1.0), ConfigError);
}

TEST_CASE("echo amplitude on a 2x2 system")
{
    const std::vector<double> h0{0.0, 1.0};
    const double eps = 0.1;
    Matrix h(2, 2);
    h << 0.0, eps, eps, 1.0;
    const SpectralDecomposition dec = decompose(h);

    Vector psi(2);
    psi << Complex(0.6, 0.0), Complex(0.0, 0.8);
    const double t = 1.0;

    // exp(-iHt) for H = a I + b.sigma: e^{-iat} (cos(|b|t) - i sin(|b|t) b.sigma/|b|)
    const double a = 0.5;
    const double bx = eps;
    const double bz = -0.5;
    const double b = std::hypot(bx, bz);
    const Complex c = std::cos(b * t);
    const Complex s = Complex(0.0, -std::sin(b * t)) / b;
    Matrix u(2, 2);
    u << c + s * bz, s * bx, s * bx, c - s * bz;
    u *= std::polar(1.0, -a * t);
    Matrix back = Matrix::Zero(2, 2);
    back(0, 0) = 1.0;
    back(1, 1) = std::polar(1.0, t);
    const Complex oracle = psi.dot(back * u * psi);

    const Complex f = echo_amplitude(h0, dec, psi, t);
    CHECK(std::abs(f - oracle) < 1e-10);

    CHECK(echo_amplitude(h0, dec, psi, 0.0) == Complex(1.0, 0.0));
    Matrix diag = Matrix::Zero(2, 2);
    diag(1, 1) = 1.0;
    const auto same = decompose(diag);
    CHECK(std::abs(echo_amplitude(h0, same, psi, 3.7) - 1.0) < 1e-12);

    Vector bad = psi * 1.1;
    CHECK_THROWS_AS(echo_amplitude(h0, dec, bad, t), ConfigError);
    const std::vector<double> wrong{0.0, 1.0, 2.0};
    CHECK_THROWS_AS(echo_amplitude(wrong, dec, psi, t), ConfigError);
}

TEST_CASE("single-state amplitudes stay inside the unit disc")
{
    Engine rng = derive_stream(3, 0);
    const auto spectrum = sample_unfolded_levels(EnsembleKind::GUE, 40, rng);
    const auto v = sample_perturbation(PerturbationKind::FullGUE, 40, rng);
    Matrix h = 0.8 * v.entries;
    for (Index i = 0; i < 40; ++i) {
        h(i, i) += spectrum.levels[static_cast<std::size_t>(i)];
    }
    const auto dec = decompose(h);
    for (int k = 0; k < 20; ++k) {
        const Vector psi = random_state(40, rng);
        for (double t : {0.3, 4.0, 25.0}) {
            CHECK(std::abs(echo_amplitude(spectrum.levels, dec, psi, t)) <= 1.0 + 1e-10);
        }
    }
}

TEST_CASE("random states reproduce the trace")
{
    // <psi|P|psi> for a rank-k projector averages to k/N
    Engine rng = derive_stream(4, 0);
    const Index n = 30;
    const Index k = 7;
    const int samples = 2000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Vector psi = random_state(n, rng);
        CHECK(psi.norm() == Approx(1.0).epsilon(1e-14));
        const double x = psi.head(k).squaredNorm();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / samples;
    const double sigma = std::sqrt((sum_sq / samples - mean * mean) / samples);
    CHECK(std::abs(mean - static_cast<double>(k) / n) < 5.0 * sigma);
}

TEST_CASE("zero perturbation gives a perfect echo")
{
    EchoRunConfig cfg = small_config();
    cfg.epsilon = 0.0;
    const auto out = run_fidelity_mc(cfg);
    for (std::size_t j = 0; j < out.size(); ++j) {
        CHECK(out.mean_re_f[j] == 1.0);
        CHECK(out.mean_im_f[j] == 0.0);
        CHECK(out.mean_F[j] == 1.0);
        CHECK(out.stderr_re_f[j] == 0.0);
        CHECK(out.stderr_F[j] == 0.0);
    }
    CHECK(out.n_samples == 12);
}

TEST_CASE("fidelity MC basic contracts")
{
    const EchoRunConfig cfg = small_config();
    const auto out = run_fidelity_mc(cfg);
    REQUIRE(out.size() == 4);
    CHECK(out.mean_re_f[0] == 1.0);
    CHECK(out.mean_im_f[0] == 0.0);
    CHECK(out.mean_F[0] == 1.0);
    for (std::size_t j = 1; j < out.size(); ++j) {
        CHECK(out.mean_F[j] <= 1.0 + 3.0 * out.stderr_F[j]);
        CHECK(out.mean_F[j] >= 0.0);
        CHECK(out.mean_re_f[j] < 1.0);
    }

    // bitwise independent of the worker count
    const auto threaded = run_fidelity_mc(cfg, 3);
    CHECK(threaded.mean_re_f == out.mean_re_f);
    CHECK(threaded.mean_im_f == out.mean_im_f);
    CHECK(threaded.stderr_F == out.stderr_F);

    // with a single sample, mean_F is exactly |mean f|^2
    EchoRunConfig one = cfg;
    one.n_realizations = 1;
    one.n_states_per_realization = 1;
    const auto single = run_fidelity_mc(one);
    for (std::size_t j = 0; j < single.size(); ++j) {
        CHECK(single.mean_F[j] == single.mean_re_f[j] * single.mean_re_f[j] + single.mean_im_f[j] * single.mean_im_f[j]);
    }
}

TEST_CASE("config validation")
{
    auto expect_reject = [](auto mutate) {
        EchoRunConfig cfg = small_config();
        mutate(cfg);
        CHECK_THROWS_AS(run_fidelity_mc(cfg), ConfigError);
    };
    expect_reject([](EchoRunConfig& c) { c.epsilon = -0.1; });
    expect_reject([](EchoRunConfig& c) { c.time_grid = {0.0, 0.5, 0.5}; });
    expect_reject([](EchoRunConfig& c) { c.time_grid = {-0.1, 0.5}; });
    expect_reject([](EchoRunConfig& c) { c.time_grid.clear(); });
    expect_reject([](EchoRunConfig& c) { c.n_realizations = 0; });
    expect_reject([](EchoRunConfig& c) { c.n_states_per_realization = 0; });
    expect_reject([](EchoRunConfig& c) { c.band = 1.5; });
    expect_reject([](EchoRunConfig& c) { c.n = 1; });
}

TEST_CASE("small GUE run tracks the exact curve")
{
    EchoRunConfig cfg;
    cfg.n = 256;
    cfg.epsilon = unmap_epsilon_units(1.0, kUnfoldedHeisenbergTime);
    cfg.time_grid = {0.25, 0.5, 1.0};
    cfg.n_realizations = 12;
    cfg.n_states_per_realization = 6;
    cfg.master_seed = 2;
    const auto out = run_fidelity_mc(cfg);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double exact = susy_fidelity_gue(1.0, out.t_over_tau_h[j]);
        INFO("t " << out.t_over_tau_h[j]);
        CHECK(std::abs(out.mean_re_f[j] - exact) < 4.0 * out.stderr_re_f[j] + 0.03);
    }
}
