#include <catch_amalgamated.hpp>

#include <cmath>

#include "echo_rmt/spectator_purity.hpp"

using namespace echo_rmt;
using Catch::Approx;

namespace {

SpectatorConfig small_run()
{
    SpectatorConfig cfg;
    cfg.n_env = 16;
    cfg.lambda = 0.1;
    cfg.delta = 0.5;
    cfg.theta1 = kPi / 4.0;
    cfg.theta2 = kPi / 8.0;
    cfg.time_grid = {0.0, 0.2, 0.6, 1.5};
    cfg.n_realizations = 3;
    cfg.n_states = 2;
    cfg.master_seed = 17;
    return cfg;
}

PuritySeries flat(std::vector<double> grid, double p)
{
    PuritySeries s;
    s.mean_P.assign(grid.size(), p);
    s.stderr_P.assign(grid.size(), 0.0);
    s.t_over_tau_h = std::move(grid);
    return s;
}

} // namespace

TEST_CASE("initial central states")
{
    const auto a = initial_central_state(0.0, 0.0);
    CHECK(a == Eigen::Vector4cd(1.0, 0.0, 0.0, 0.0));
    const auto b = initial_central_state(kPi / 4.0, 0.0);
    CHECK((b - bell_state()).norm() < 1e-15);
    CHECK_THROWS_AS(initial_central_state(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(initial_central_state(0.1, 2.0), ConfigError);

    // Schmidt form: the coupled qubit's reduced state has eigenvalues cos^2, sin^2 of theta1
    for (double t1 : {0.0, 0.3, kPi / 4.0}) {
        for (double t2 : {0.0, 0.7, kPi / 2.0}) {
            const auto psi = initial_central_state(t1, t2);
            CHECK(psi.norm() == Approx(1.0).epsilon(1e-15));
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(trace_second(pure_density(psi)));
            const double c2 = std::cos(t1) * std::cos(t1);
            CHECK(es.eigenvalues()(0) == Approx(std::min(c2, 1.0 - c2)).margin(1e-14));
            CHECK(es.eigenvalues()(1) == Approx(std::max(c2, 1.0 - c2)).margin(1e-14));
            CHECK(purity(DensityMatrix4{pure_density(psi)}) == Approx(1.0));
        }
    }
}

TEST_CASE("geometric factors")
{
    CHECK(g_theta(0.0) == 1.0);
    CHECK(g_theta(kPi / 4.0) == Approx(0.5).epsilon(1e-15));
    CHECK(g1(kPi / 4.0, kPi / 4.0) == Approx(0.5).epsilon(1e-15));
    CHECK(g2(kPi / 4.0, kPi / 4.0) == Approx(1.0).epsilon(1e-15));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const double t1 = (kPi / 4.0) * i / 99.0;
            const double t2 = (kPi / 2.0) * j / 99.0;
            worst = std::max(worst, std::abs(g2(t1, t2) - (2.0 - g1(t1, t2) - g_theta(t1))));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("r function")
{
    CHECK(r_function(0.0, 1.0) == 0.0);
    CHECK(r_function(1.0, 1.0, PurityConvention::AsPrinted) == Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(r_function(1.0, 1.0, PurityConvention::BornConsistent) == Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK(r_function(1000.0, 1.0, PurityConvention::AsPrinted) / 1e6 == Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(r_function(-1.0, 1.0), ConfigError);
    CHECK(parse_purity_convention(to_string(PurityConvention::AsPrinted)) == PurityConvention::AsPrinted);
    CHECK(parse_purity_regime("fast") == PurityRegime::Fast);
    CHECK(parse_coupling_layout("both") == CouplingLayout::BothQubits);
    CHECK_THROWS_AS(parse_purity_regime("slow"), ConfigError);
}

TEST_CASE("linear-response purity in closed form")
{
    CHECK(lr_purity(kPi / 4.0, 0.0, 0.03, 0.0, 1.0, 1.0, PurityRegime::Degenerate, PurityConvention::AsPrinted)
          == Approx(0.99775).epsilon(1e-14));
    for (auto regime : {PurityRegime::General, PurityRegime::Degenerate, PurityRegime::Fast}) {
        CHECK(lr_purity(0.3, 0.4, 0.0, 2.0, 3.0, 1.0, regime) == 1.0);
    }
    // Fast minus Degenerate is lambda^2 g2 (r - 2 t tau_H) >= 0
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double fast = lr_purity(0.4, 0.9, 0.05, 0.0, t, 1.0, PurityRegime::Fast);
        const double deg = lr_purity(0.4, 0.9, 0.05, 0.0, t, 1.0, PurityRegime::Degenerate);
        CHECK(fast >= deg);
        CHECK(fast - deg == Approx(0.0025 * g2(0.4, 0.9) * (r_function(t, 1.0) - 2.0 * t)).epsilon(1e-10));
    }
}

TEST_CASE("general regime reproduces both limits")
{
    const double lambda = 0.1;
    for (double t1 : {0.0, kPi / 4.0}) {
        for (double t : {0.4, 1.0, 2.5}) {
            INFO("theta1 " << t1 << " t " << t);
            const double gen0 = lr_purity(t1, 0.5, lambda, 0.0, t, 1.0, PurityRegime::General);
            const double deg = lr_purity(t1, 0.5, lambda, 0.0, t, 1.0, PurityRegime::Degenerate);
            CHECK(1.0 - gen0 == Approx(1.0 - deg).epsilon(1e-9));

            const double gen_inf = lr_purity(t1, 0.5, lambda, 400.0, t, 1.0, PurityRegime::General);
            const double fast = lr_purity(t1, 0.5, lambda, 400.0, t, 1.0, PurityRegime::Fast);
            CHECK(1.0 - gen_inf == Approx(1.0 - fast).epsilon(2e-3));
        }
    }
}

TEST_CASE("exponentiated purity")
{
    CHECK(p_infinity(kPi / 4.0) == Approx(0.25));
    CHECK(p_infinity(0.0) == Approx(0.5));
    CHECK(elr_purity(1.0, 0.25) == 1.0);
    CHECK(elr_purity(-1e6, 0.25) == Approx(0.25));
    CHECK(elr_purity(0.9, 0.5) == Approx(0.5 + 0.5 * std::exp(-0.2)).epsilon(1e-15));
    CHECK_THROWS_AS(elr_purity(1.1, 0.25), ConfigError);
    CHECK_THROWS_AS(elr_purity(0.9, 1.0), ConfigError);

    SpectatorConfig cfg;
    cfg.theta1 = kPi / 4.0;
    cfg.lambda = 0.01;
    CHECK(p_infinity_for(cfg) == Approx(0.25));
    cfg.layout = CouplingLayout::BothQubits;
    CHECK(p_infinity_for(cfg) == 0.25);
    CHECK(lr_purity_for(cfg, 0.5) == Approx(1.0 - 2.0 * (1.0 - lr_purity(kPi / 4.0, 0.0, 0.01, 0.0, kPi, 2.0 * kPi, PurityRegime::General))));
    CHECK(elr_purity_for(cfg, 0.0) == 1.0);
    cfg.theta1 = 0.0;
    cfg.theta2 = kPi / 4.0;
    CHECK_THROWS_AS(lr_purity_for(cfg, 0.5), ConfigError);
}

TEST_CASE("sum rule")
{
    const std::vector<double> grid{0.0, 1.0};
    const auto one = flat(grid, 0.97);
    CHECK(sum_rule_combine({one}).mean_P == one.mean_P);
    CHECK(sum_rule_combine({flat(grid, 0.99), flat(grid, 0.99)}).mean_P[1] == Approx(0.98));
    CHECK(sum_rule_combine({flat(grid, 1.0), flat(grid, 1.0), flat(grid, 1.0)}).mean_P[0] == 1.0);
    CHECK_THROWS_AS(sum_rule_combine({one, flat({0.0, 2.0}, 1.0)}), ConfigError);
    CHECK_THROWS_AS(sum_rule_combine({}), ConfigError);
}

TEST_CASE("spectator Hamiltonian")
{
    SpectatorConfig cfg = small_run();
    cfg.delta = 0.0;
    Engine rng = derive_stream(1, 0);
    const auto sys = build_spectator(cfg, rng);
    REQUIRE(sys.h0_diagonal.size() == 32);
    for (Index e = 0; e < 16; ++e) {
        CHECK(sys.h0_diagonal(2 * e) == sys.h0_diagonal(2 * e + 1));
    }
    CHECK((sys.coupling - sys.coupling.adjoint()).cwiseAbs().maxCoeff() == 0.0);

    cfg.layout = CouplingLayout::BothQubits;
    cfg.delta = 1.0;
    Engine rng2 = derive_stream(1, 0);
    const auto both = build_spectator(cfg, rng2);
    REQUIRE(both.h0_diagonal.size() == 64);
    CHECK(both.h0_diagonal(0) - both.h0_diagonal(3) == Approx(2.0));
    CHECK((both.coupling - both.coupling.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    // neither qubit's coupling flips both qubits at once
    CHECK(both.coupling(0, 3) == Complex(0.0, 0.0));
}

TEST_CASE("purity from either side of the bipartition")
{
    for (auto layout : {CouplingLayout::Spectator, CouplingLayout::BothQubits}) {
        SpectatorConfig cfg = small_run();
        cfg.n_env = 6;
        cfg.lambda = 0.8;
        cfg.layout = layout;
        cfg.theta2 = 0.0;
        Engine rng = derive_stream(2, 0);
        const auto sys = build_spectator(cfg, rng);
        const auto dec = diagonalize_coupled(sys, cfg.lambda);
        const Vector psi_env = random_state(cfg.n_env, rng);
        const Matrix init = initial_columns(layout, psi_env, initial_central_state(cfg.theta1, cfg.theta2));
        for (double t : {0.5, 3.0, 20.0}) {
            const Matrix m = central_amplitudes(layout, dec.propagate(init, t));
            const DensityMatrix4 rho = reduced_central_state(m);
            CHECK_NOTHROW(validate_density(rho, 1e-10));
            const Matrix env = m * m.adjoint();
            CHECK(purity(rho) == Approx((env * env).trace().real()).margin(1e-10));
            CHECK(purity(rho) < 1.0);
        }
    }
}

TEST_CASE("purity MC contracts")
{
    SpectatorConfig cfg = small_run();
    const auto out = run_purity_mc(cfg);
    CHECK(out.mean_P[0] == 1.0);
    CHECK(out.stderr_P[0] == 0.0);
    CHECK(out.n_samples == 6);
    for (std::size_t j = 0; j < out.size(); ++j) {
        CHECK(out.mean_P[j] >= 0.25 - 1e-12);
        CHECK(out.mean_P[j] <= 1.0 + 1e-12);
    }
    CHECK(out.mean_P[3] < out.mean_P[1]);

    const auto threaded = run_purity_mc(cfg, 3);
    CHECK(threaded.mean_P == out.mean_P);
    CHECK(threaded.stderr_C == out.stderr_C);

    cfg.lambda = 0.0;
    const auto free = run_purity_mc(cfg);
    for (double p : free.mean_P) {
        CHECK(p == Approx(1.0).margin(1e-12));
    }

    cfg.record_samples = true;
    const auto rec = run_purity_mc(cfg);
    CHECK(pooled_samples(rec).size() == 24);

    cfg.time_grid = {0.5, 0.5};
    CHECK_THROWS_AS(run_purity_mc(cfg), ConfigError);
}

TEST_CASE("weak coupling follows the Born-consistent linear response")
{
    SpectatorConfig cfg;
    cfg.n_env = 128;
    cfg.lambda = 0.02;
    cfg.delta = 0.0;
    cfg.theta1 = kPi / 4.0;
    cfg.time_grid = {0.5, 1.0};
    cfg.n_realizations = 8;
    cfg.n_states = 4;
    cfg.master_seed = 3;
    const auto out = run_purity_mc(cfg);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double born = 1.0 - lr_purity_for(cfg, cfg.time_grid[j]);
        const double printed = 1.0 - lr_purity_for(cfg, cfg.time_grid[j], PurityConvention::AsPrinted);
        const double mc = 1.0 - out.mean_P[j];
        INFO("t " << cfg.time_grid[j] << " mc " << mc << " born " << born << " printed " << printed);
        CHECK(std::abs(mc - born) < std::abs(mc - printed));
        CHECK(mc == Approx(born).epsilon(0.15));
    }
}
