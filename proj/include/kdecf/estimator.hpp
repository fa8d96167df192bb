#pragma once

#include "kdecf/charfun.hpp"
#include "kdecf/kernels.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kdecf {

/// Density estimate tabulated on a uniform grid.
struct EstimateGrid {
    std::vector<double> xs;
    std::vector<double> ys;
    double h = 0.0;
    std::string kernel_name;
    bool corrected = false;
    std::optional<double> xi; ///< shift used by the correction, when applied

    double spacing() const { return xs.size() > 1 ? (xs.back() - xs.front()) / (xs.size() - 1.0) : 0.0; }
    double integral() const;
};

/// p_n(x) = n^-1 sum_j K_h(x - X_j).
double kde_eval(const Sample& s, const KernelModel& k, double h, double x);

/// Sinc estimate by truncated Fourier inversion of the empirical
/// characteristic function over [-1/h, 1/h].
double sinc_kde_fourier(const Sample& s, double h, double x);

std::vector<double> linspace(double lo, double hi, std::size_t points);

/// 512 points over [min - 4h - 4 sd, max + 4h + 4 sd].
std::vector<double> default_grid(const Sample& s, double h, std::size_t points = 512);

EstimateGrid kde_grid(const Sample& s, const KernelModel& k, double h, std::vector<double> xs);

/// Replaces ys by max(ys - xi, 0) with xi >= 0 chosen by bisection so that
/// the trapezoid integral is one. Throws InfeasibleError when the positive
/// part integrates to less than one and DomainError for non-uniform grids.
EstimateGrid correct_to_density(const EstimateGrid& g);

} // namespace kdecf
