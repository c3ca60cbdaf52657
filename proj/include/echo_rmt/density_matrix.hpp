#pragma once

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "echo_rmt/common.hpp"

namespace echo_rmt {

using Matrix4 = Eigen::Matrix4cd;

/// Two-qubit density matrix in the {|00>, |01>, |10>, |11>} basis.
struct DensityMatrix4 {
    Matrix4 entries = Matrix4::Zero();
};

inline constexpr double kDensityTolerance = 1e-12;
inline constexpr double kNegativityTolerance = 1e-10;

/// Throws NumericalError unless rho is Hermitian and unit-trace within `tol` and PSD within 1e-10.
inline void validate_density(const DensityMatrix4& rho, double tol = kDensityTolerance)
{
    const Matrix4& m = rho.entries;
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) {
        throw NumericalError("density matrix not Hermitian (deviation " + std::to_string(herm) + ")");
    }
    const Complex tr = m.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > tol) {
        throw NumericalError("density matrix trace " + std::to_string(tr.real()) + " differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix4> solver(m, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kNegativityTolerance) {
        throw NumericalError("density matrix has eigenvalue " + std::to_string(solver.eigenvalues().minCoeff()));
    }
}

/// Projector |psi><psi| of a normalized 4-vector.
inline DensityMatrix4 pure_density(const Eigen::Vector4cd& psi)
{
    return {psi * psi.adjoint()};
}

/// P = tr rho^2.
inline double purity(const DensityMatrix4& rho)
{
    // tr(rho rho) = sum |rho_ij|^2 for Hermitian rho.
    return rho.entries.cwiseAbs2().sum();
}

/// Reduced state of the first qubit (trace over the second).
inline Eigen::Matrix2cd trace_second(const DensityMatrix4& rho)
{
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            out(a, b) = rho.entries(2 * a, 2 * b) + rho.entries(2 * a + 1, 2 * b + 1);
        }
    }
    return out;
}

/// Reduced state of the second qubit (trace over the first).
inline Eigen::Matrix2cd trace_first(const DensityMatrix4& rho)
{
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            out(a, b) = rho.entries(a, b) + rho.entries(2 + a, 2 + b);
        }
    }
    return out;
}

/// Bell state (|00> - |11>)/sqrt(2).
inline Eigen::Vector4cd bell_state()
{
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = kInvSqrt2;
    psi(3) = -kInvSqrt2;
    return psi;
}

/// Werner state (1 - alpha) |Bell><Bell| + alpha 1/4.
inline DensityMatrix4 werner_state(double alpha)
{
    require(alpha >= 0.0 && alpha <= 1.0, "werner_state: alpha must lie in [0, 1]");
    const Eigen::Vector4cd b = bell_state();
    return {(1.0 - alpha) * (b * b.adjoint()) + (alpha / 4.0) * Matrix4::Identity()};
}

} // namespace echo_rmt
