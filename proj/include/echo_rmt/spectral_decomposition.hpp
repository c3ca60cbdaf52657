#pragma once

#include <string>

#include "echo_rmt/common.hpp"

namespace echo_rmt {

/// Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian operator.
struct SpectralDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;

    [[nodiscard]] Index dim() const { return eigenvalues.size(); }

    /// exp(-i H t) applied to a block of column vectors.
    [[nodiscard]] Matrix propagate(const Matrix& states, double t) const
    {
        Matrix coeffs = eigenvectors.adjoint() * states;
        for (Index j = 0; j < coeffs.rows(); ++j) {
            coeffs.row(j) *= std::polar(1.0, -eigenvalues(j) * t);
        }
        return eigenvectors * coeffs;
    }
};

inline SpectralDecomposition decompose(const Matrix& h, const std::string& context = "Hermitian matrix")
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed on " + context);
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

} // namespace echo_rmt
