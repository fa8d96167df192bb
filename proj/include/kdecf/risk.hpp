#pragma once

#include "kdecf/charfun.hpp"
#include "kdecf/kernels.hpp"
#include "kdecf/quadrature.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kdecf {

struct RiskInputs {
    std::string density;
    std::string kernel;
    double h = 0.0;
    std::size_t n = 0;
};

/// Exact finite-sample risk of a kernel estimator, evaluated in the Fourier
/// domain.
struct RiskReport {
    double mise = 0.0;
    std::map<double, double> mse_at;
    std::map<double, double> bias_at;
    double quad_error = 0.0;
    bool degraded = false; ///< quad_error exceeds 1e-6 * max(1, mise)
    RiskInputs inputs;
};

/// Bias E p_n(x) - p(x). Throws ConfigError when f is not absolutely
/// integrable (no certified tail bound).
double exact_bias(const DensityModel& d, const KernelModel& k, double h, double x);

/// MISE of a density-kernel estimator. When `xs` is nonempty the pointwise
/// MSE and bias are filled in as well. The sinc kernel is rejected with
/// UnsupportedKernelError; use sinc_exact_mise.
RiskReport exact_mise(const DensityModel& d, const KernelModel& k, double h, std::size_t n,
                      std::span<const double> xs = {});

/// MISE of the sinc estimator.
RiskReport sinc_exact_mise(const DensityModel& d, double h, std::size_t n);

/// Pointwise MSE(p_n(x)), via the squared bias plus the variance
/// n^-1 [(K_h^2 * p)(x) - (K_h * p)(x)^2], both evaluated as one-dimensional
/// Fourier integrals. Accepts the sinc kernel.
double exact_mse(const DensityModel& d, const KernelModel& k, double h, std::size_t n, double x);

/// max over `xs` of exact_mse.
double max_exact_mse(const DensityModel& d, const KernelModel& k, double h, std::size_t n,
                     std::span<const double> xs);

/// `points` equally spaced x values over the region where p exceeds 1e-4 of
/// its maximum (the model's support when no pdf is available).
std::vector<double> mse_grid(const DensityModel& d, std::size_t points = 41);

struct McResult {
    double estimate = 0.0;
    std::optional<double> std_error; ///< undefined for a single replication
    std::size_t reps = 0;
};

/// Monte-Carlo MISE: mean trapezoid ISE over `reps` samples. Replication r is
/// drawn from std::mt19937_64 seeded with seed + r, so results do not depend
/// on thread scheduling.
McResult mc_mise(const DensityModel& d, const KernelModel& k, double h, std::size_t n, std::size_t reps,
                 std::uint64_t seed);

// Fourier-domain building blocks shared with the bound formulas. Integrals
// run over the whole real line.

/// int |f(t)|^2 |1 - phi(h t)|^2 dt
quad::Result bias_sq_integral(const DensityModel& d, const KernelModel& k, double h);
/// int |f(t)| |1 - phi(h t)| dt; value is +inf when f is not integrable
quad::Result abs_bias_integral(const DensityModel& d, const KernelModel& k, double h);
/// int_{|t| >= 1/h} |f(t)|^2 dt
quad::Result sinc_tail_sq_integral(const DensityModel& d, double h);
/// int_{|t| >= 1/h} |f(t)| dt; +inf when f is not integrable
quad::Result sinc_tail_abs_integral(const DensityModel& d, double h);

} // namespace kdecf
