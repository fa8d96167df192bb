#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace kdecf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A smoothing kernel K together with its Fourier transform and the scalar
/// functionals consumed by the risk formulas. All built-in kernels are
/// symmetric, so the transform is real.
///
/// Immutable after construction.
struct KernelModel {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> cf;

    /// Fourier transform of K^2, i.e. (2 pi)^-1 (cf * cf).
    std::function<double(double)> sq_cf;
    /// Self-convolution (K * K)(u).
    std::function<double(double)> self_conv;
    /// sup over |s| >= u of |cf(s)|; a rigorous majorant used for truncation.
    std::function<double(double)> cf_tail;

    std::optional<double> mu1;  ///< int |x| K(x) dx, absent for sinc
    std::optional<double> mu2;  ///< int x^2 K(x) dx, absent for sinc
    double roughness = 0.0;     ///< R(K) = int K^2
    double a_value = kInf;      ///< A(K) = (2 pi)^-1 int |cf|, +inf when not integrable
    double cf_support = kInf;   ///< cf(s) = 0 for |s| > cf_support
    bool is_density = true;
    bool is_sinc = false;
    bool zero_mean = true;
};

/// gaussian | epanechnikov | uniform | sinc. Unknown names throw ConfigError.
KernelModel make_builtin(std::string_view name);

/// Shared instance of the built-in sinc kernel.
const KernelModel& sinc_kernel();

/// User-supplied symmetric kernel given by (eval, cf). Moments, roughness and
/// A(K) are computed by quadrature; `support` bounds the region where K is
/// nonzero (use kInf for unbounded support).
KernelModel make_custom(std::string name, std::function<double(double)> eval,
                        std::function<double(double)> cf, double support = kInf);

/// K_h(x) = K(x / h) / h. Throws DomainError for h <= 0.
double scaled_eval(const KernelModel& k, double h, double x);

/// K_h(x) for the sinc kernel with the series branch near zero.
double sinc_value(double x);

} // namespace kdecf
