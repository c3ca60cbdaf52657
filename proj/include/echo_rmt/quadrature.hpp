#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "echo_rmt/common.hpp"

namespace echo_rmt {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/*
 * Adaptive 31-point Gauss-Kronrod on [a, b] to relative tolerance `rel_tol`.
 * Throws NumericalError, carrying the achieved error estimate, when the
 * estimate exceeds both the relative target and `abs_floor`.
 */
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol, double abs_floor = 1e-300,
                           unsigned max_depth = 30)
{
    if (a == b) {
        return {};
    }
    // Intervals a few ulps wide: bisection cannot shrink the error estimate further.
    if (std::abs(b - a) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
        return {f(0.5 * (a + b)) * (b - a), 0.0};
    }
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, max_depth, rel_tol, &error, &l1);
    if (!std::isfinite(value) || (error > rel_tol * std::max(std::abs(value), l1) * 10.0 && error > abs_floor)) {
        std::ostringstream msg;
        msg << "quadrature on [" << a << ", " << b << "] did not converge: value " << value
            << ", error estimate " << error;
        throw NumericalError(msg.str());
    }
    return {value, error};
}

} // namespace echo_rmt
