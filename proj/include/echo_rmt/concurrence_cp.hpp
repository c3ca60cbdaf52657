#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/SVD>

#include "echo_rmt/common.hpp"
#include "echo_rmt/density_matrix.hpp"

namespace echo_rmt {

/// sigma_y (x) sigma_y in the computational basis (real).
inline Matrix4 sigma_yy()
{
    Matrix4 y = Matrix4::Zero();
    y(0, 3) = -1.0;
    y(1, 2) = 1.0;
    y(2, 1) = 1.0;
    y(3, 0) = -1.0;
    return y;
}

/*
 * Wootters concurrence max{0, L1 - L2 - L3 - L4}.
 *
 * The L_i (square roots of the eigenvalues of rho Y rho* Y) are obtained as
 * the singular values of sqrt(rho) Y sqrt(rho)*, which avoids the square root
 * of a non-Hermitian product. Eigenvalues of rho down to -1e-10 are clamped.
 */
inline double concurrence(const DensityMatrix4& rho)
{
    Eigen::SelfAdjointEigenSolver<Matrix4> solver(rho.entries);
    Eigen::Vector4d w = solver.eigenvalues();
    if (w.minCoeff() < -kNegativityTolerance) {
        throw NumericalError("concurrence: density matrix has eigenvalue " + std::to_string(w.minCoeff()));
    }
    w = w.cwiseMax(0.0).cwiseSqrt();
    const Matrix4 root = solver.eigenvectors() * w.asDiagonal() * solver.eigenvectors().adjoint();
    const Matrix4 a = root * sigma_yy() * root.conjugate();
    const Eigen::Vector4d s = Eigen::JacobiSVD<Matrix4>(a).singularValues(); // descending
    return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

/// 2 |a d - b c| for a pure state with amplitudes (a, b, c, d).
inline double pure_state_concurrence(const Eigen::Vector4cd& psi)
{
    return 2.0 * std::abs(psi(0) * psi(3) - psi(1) * psi(2));
}

/// C_W(P) = max{0, (sqrt(12P - 3) - 1)/2}, concurrence of the Werner state with purity P.
inline double werner_curve(double p)
{
    require(p >= 0.25 - kDensityTolerance && p <= 1.0 + kDensityTolerance, "werner_curve: purity must lie in [1/4, 1]");
    return std::max(0.0, (std::sqrt(std::max(0.0, 12.0 * p - 3.0)) - 1.0) / 2.0);
}

/// Largest concurrence attainable at purity P (maximally entangled mixed states).
inline double mems_concurrence_bound(double p)
{
    require(p >= 0.25 - kDensityTolerance && p <= 1.0 + kDensityTolerance, "mems bound: purity must lie in [1/4, 1]");
    if (p < 1.0 / 3.0) {
        return 0.0;
    }
    if (p < 5.0 / 9.0) {
        return std::sqrt(2.0 * (p - 1.0 / 3.0));
    }
    return (1.0 + std::sqrt(std::max(0.0, 2.0 * p - 1.0))) / 2.0;
}

/// One (P, C) observation.
struct CPPoint {
    double purity = 1.0;
    double concurrence = 1.0;
};

/// Mean concurrence over the observations in one purity interval.
struct CPBin {
    double purity = 0.0;
    double concurrence = 0.0;
    double stderr_concurrence = 0.0;
    std::size_t n_samples = 0;
};

struct CPCurve {
    /// Ordered by decreasing purity.
    std::vector<CPBin> points;
    double p_min = 1.0 / 3.0;
};

inline constexpr int kDefaultPurityBins = 40;

/*
 * Averages concurrence within equal-width purity bins over [p_lo, 1]. Each
 * bin's abscissa is the mean purity of its members; empty bins are dropped.
 */
inline CPCurve bin_cp_points(const std::vector<CPPoint>& samples, int n_bins = kDefaultPurityBins,
                             double p_min = 1.0 / 3.0, double p_lo = 0.25)
{
    require(n_bins >= 1, "bin_cp_points: need at least one bin");
    require(p_lo < 1.0, "bin_cp_points: p_lo must be below 1");
    require(p_min >= p_lo && p_min < 1.0, "bin_cp_points: p_min must lie in [p_lo, 1)");
    const double width = (1.0 - p_lo) / n_bins;
    std::vector<double> sum_p(static_cast<std::size_t>(n_bins), 0.0);
    std::vector<double> sum_c(sum_p.size(), 0.0);
    std::vector<double> sum_c2(sum_p.size(), 0.0);
    std::vector<std::size_t> count(sum_p.size(), 0);
    for (const auto& s : samples) {
        if (s.purity < p_lo - kDensityTolerance || s.purity > 1.0 + 1e-9) {
            throw NumericalError("bin_cp_points: purity " + std::to_string(s.purity) + " outside [p_lo, 1]");
        }
        const auto k = static_cast<std::size_t>(
            std::clamp(static_cast<int>(std::floor((s.purity - p_lo) / width)), 0, n_bins - 1));
        sum_p[k] += s.purity;
        sum_c[k] += s.concurrence;
        sum_c2[k] += s.concurrence * s.concurrence;
        ++count[k];
    }
    CPCurve curve;
    curve.p_min = p_min;
    for (std::size_t i = sum_p.size(); i-- > 0;) {
        if (count[i] == 0) {
            continue;
        }
        const double n = static_cast<double>(count[i]);
        const double mean_c = sum_c[i] / n;
        const double var = count[i] > 1 ? std::max(0.0, (sum_c2[i] - n * mean_c * mean_c) / (n - 1.0)) : 0.0;
        curve.points.push_back({sum_p[i] / n, mean_c, std::sqrt(var / n), count[i]});
    }
    return curve;
}

inline constexpr std::size_t kMinCurvePoints = 20;

/*
 * D = integral_{p_min}^1 |C(P) - C_ref(P)| dP by the trapezoidal rule on the
 * curve's own purity nodes plus both end points; C is interpolated linearly
 * and held at its end values outside the sampled range.
 */
inline double cp_distance(const CPCurve& curve, const std::function<double(double)>& reference = werner_curve)
{
    std::vector<std::pair<double, double>> pts;
    pts.reserve(curve.points.size());
    for (const auto& b : curve.points) {
        pts.emplace_back(b.purity, b.concurrence);
    }
    std::sort(pts.begin(), pts.end());
    const auto inside = std::count_if(pts.begin(), pts.end(), [&](const auto& p) {
        return p.first >= curve.p_min && p.first <= 1.0;
    });
    require(static_cast<std::size_t>(inside) >= kMinCurvePoints,
            "cp_distance: curve has " + std::to_string(inside) + " points in [p_min, 1], need "
                + std::to_string(kMinCurvePoints));

    auto c_at = [&](double p) {
        if (p <= pts.front().first) {
            return pts.front().second;
        }
        if (p >= pts.back().first) {
            return pts.back().second;
        }
        const auto hi = std::lower_bound(pts.begin(), pts.end(), std::make_pair(p, -1.0e300));
        const auto lo = hi - 1;
        const double w = (p - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    };

    std::vector<double> nodes{curve.p_min};
    for (const auto& p : pts) {
        if (p.first > curve.p_min && p.first < 1.0) {
            nodes.push_back(p.first);
        }
    }
    nodes.push_back(1.0);
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    double d = 0.0;
    double prev = std::abs(c_at(nodes[0]) - reference(nodes[0]));
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double cur = std::abs(c_at(nodes[i]) - reference(nodes[i]));
        d += 0.5 * (prev + cur) * (nodes[i] - nodes[i - 1]);
        prev = cur;
    }
    return d;
}

/// Empirical fit D = 1/(2^3.5 N_e) + 1/2^(5 + 50 lambda) for Delta = 1.
inline double ansatz_distance(double lambda, double n_env)
{
    require(lambda >= 0.0, "ansatz_distance: lambda must be nonnegative");
    require(n_env > 0.0, "ansatz_distance: n_env must be positive");
    return 1.0 / (std::pow(2.0, 3.5) * n_env) + std::pow(2.0, -(5.0 + 50.0 * lambda));
}

/// Concurrence predicted from an ELR purity value: the Werner curve at that purity.
inline double elr_concurrence(double p_elr)
{
    return werner_curve(p_elr);
}

/// Same, with the purity prediction given as a function of time.
inline double elr_concurrence(double t, const std::function<double(double)>& purity_elr)
{
    return elr_concurrence(purity_elr(t));
}

/// Near P = 1 the Werner curve has unit slope, so C_LR(t) = P_LR(t).
inline double lr_concurrence(double p_lr)
{
    return p_lr;
}

} // namespace echo_rmt
