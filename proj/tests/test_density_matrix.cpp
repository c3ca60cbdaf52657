#include <catch_amalgamated.hpp>

#include <cmath>

#include "echo_rmt/density_matrix.hpp"

using namespace echo_rmt;
using Catch::Approx;

TEST_CASE("purity examples")
{
    Eigen::Vector4cd psi(Complex(0.5, 0.0), Complex(0.0, 0.5), Complex(-0.5, 0.0), Complex(0.5, 0.0));
    CHECK(purity(pure_density(psi)) == Approx(1.0).epsilon(1e-14));
    const DensityMatrix4 mixed{Matrix4::Identity() / 4.0};
    CHECK(purity(mixed) == Approx(0.25).epsilon(1e-14));
    // alpha^2/4 + alpha (1 - alpha)/2 + (1 - alpha)^2 at alpha = 0.5
    CHECK(purity(werner_state(0.5)) == Approx(0.4375).epsilon(1e-14));
    // against tr(rho rho) taken literally
    const DensityMatrix4 w = werner_state(0.3);
    CHECK(purity(w) == Approx((w.entries * w.entries).trace().real()).epsilon(1e-14));
}

TEST_CASE("density validation")
{
    CHECK_NOTHROW(validate_density(werner_state(0.2)));
    CHECK_NOTHROW(validate_density(pure_density(bell_state())));

    DensityMatrix4 not_hermitian = werner_state(0.2);
    not_hermitian.entries(0, 1) += Complex(0.0, 1e-6);
    CHECK_THROWS_AS(validate_density(not_hermitian), NumericalError);

    DensityMatrix4 wrong_trace{Matrix4::Identity() / 3.0};
    CHECK_THROWS_AS(validate_density(wrong_trace), NumericalError);

    DensityMatrix4 negative{Matrix4::Zero()};
    negative.entries(0, 0) = 1.1;
    negative.entries(1, 1) = -0.1;
    CHECK_THROWS_AS(validate_density(negative), NumericalError);

    CHECK_THROWS_AS(werner_state(1.5), ConfigError);
}

TEST_CASE("partial traces")
{
    // |0>|+> : first qubit |0><0|, second |+><+|
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = kInvSqrt2;
    psi(1) = kInvSqrt2;
    const auto rho = pure_density(psi);
    const Eigen::Matrix2cd a = trace_second(rho);
    const Eigen::Matrix2cd b = trace_first(rho);
    CHECK(a(0, 0).real() == Approx(1.0));
    CHECK(std::abs(a(1, 1)) == Approx(0.0).margin(1e-15));
    CHECK(std::abs(a(0, 1)) == Approx(0.0).margin(1e-15));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(b(i, j).real() == Approx(0.5));
        }
    }
}

TEST_CASE("Bell state marginals are maximally mixed")
{
    const Eigen::Vector4cd b = bell_state();
    CHECK(b.norm() == Approx(1.0).epsilon(1e-15));
    const auto rho = pure_density(b);
    const Eigen::Matrix2cd a = trace_second(rho);
    const Eigen::Matrix2cd c = trace_first(rho);
    CHECK((a - Eigen::Matrix2cd::Identity() / 2.0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((c - Eigen::Matrix2cd::Identity() / 2.0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(werner_state(0.0).entries == rho.entries);
    CHECK((werner_state(1.0).entries - Matrix4::Identity() / 4.0).cwiseAbs().maxCoeff() < 1e-15);
}
