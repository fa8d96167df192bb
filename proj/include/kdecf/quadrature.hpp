#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kdecf::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;

    Result& operator+=(const Result& other)
    {
        value += other.value;
        error += other.error;
        return *this;
    }
};

using Fn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (15 point) on a finite interval.
Result integrate(const Fn& f, double a, double b, double rel_tol = 1e-13);

/// Splits [a, b] into `panels` equal pieces, honoring extra breakpoints that
/// fall inside the interval, and integrates each piece adaptively.
Result integrate_panels(const Fn& f, double a, double b, std::size_t panels,
                        std::span<const double> breakpoints = {});

/// Integral of |g| over [a, b]. Sign changes are located on a uniform scan of
/// `scan` cells and refined by bisection so that each piece is smooth.
Result integrate_abs(const Fn& g, double a, double b, std::size_t scan);

/// Roots of g on [a, b] found by sign-change scan plus bisection.
std::vector<double> scan_roots(const Fn& g, double a, double b, std::size_t scan);

/// Fixed-order Gauss-Legendre rule on [a, b] split into `panels` pieces.
double gauss_legendre(const Fn& f, double a, double b, std::size_t panels);

/// Trapezoid rule over a uniform grid with spacing dx.
double trapezoid(std::span<const double> ys, double dx);

} // namespace kdecf::quad
