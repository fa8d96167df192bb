#pragma once

#include "kdecf/kernels.hpp"

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kdecf {

using Rng = std::mt19937_64;

/// Supersmoothness parameters: B = int exp(gamma |t|^alpha) |f(t)| dt < inf.
struct Supersmooth {
    double alpha = 0.0;
    double gamma = 0.0;
    double B = 0.0;
};

/// A target density p described through its characteristic function f plus
/// the regularity constants the risk bounds are stated in.
///
/// `variation[m]` holds V_m = V(p^(m)) and is present only when p is m times
/// differentiable with p^(m) of bounded variation.
struct DensityModel {
    std::string name;
    std::function<std::complex<double>(double)> cf;
    std::function<double(double)> pdf;
    /// p^(k)(x); empty when derivatives are unavailable.
    std::function<double(double, int)> derivative;
    std::map<int, double> variation;
    std::optional<double> sup_bound;
    std::optional<Supersmooth> supersmooth;
    std::optional<double> cf_cutoff;
    std::optional<double> a_p;
    /// R(p) = int p^2 = (2 pi)^-1 int |f|^2.
    std::optional<double> roughness;
    bool unimodal = false;

    /// Largest |x| frequency appearing in the oscillation of f (location
    /// shifts, interval half-widths); sets quadrature panel widths.
    double cf_frequency = 0.0;
    /// Interval carrying all but a negligible amount of the density's mass
    /// and of p^2; used for x-grids.
    std::pair<double, double> support{-8.0, 8.0};

    std::function<double(Rng&)> sampler;

    double cf_abs(double t) const { return std::abs(cf(t)); }
};

DensityModel make_normal(double mu = 0.0, double sigma = 1.0);
DensityModel make_normal_mixture(std::vector<double> weights, std::vector<double> means,
                                 std::vector<double> sds);
/// Symmetric two-component mixture 0.5 N(-1, (2/3)^2) + 0.5 N(1, (2/3)^2).
DensityModel make_bimodal();
DensityModel make_laplace(double mu = 0.0, double b = 1.0);
DensityModel make_uniform(double lo = 0.0, double hi = 1.0);
/// Fejer-type density (1 - cos(tau x)) / (pi tau x^2), cf (1 - |t|/tau)_+.
DensityModel make_fejer(double tau = 1.0);

/// Built-in lookup by name with named parameters (normal: mu, sigma;
/// mixture: weights, means, sds; laplace: mu, b; uniform: lo, hi; fejer: tau).
DensityModel make_density(const std::string& name,
                          const std::map<std::string, std::vector<double>>& params = {});

/// Ordered observations X_1 <= ... <= X_n, n >= 1.
class Sample {
public:
    explicit Sample(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double min() const { return values_.front(); }
    double max() const { return values_.back(); }
    double mean() const;
    /// Standard deviation with n - 1 denominator (0 for n = 1).
    double sd() const;
    Sample shifted(double c) const;

private:
    std::vector<double> values_;
};

Sample draw_sample(const DensityModel& d, std::size_t n, Rng& rng);

/// f_n(t) = n^-1 sum exp(i t X_j), by direct summation.
std::complex<double> ecf(const Sample& s, double t);

/// (n (n-1))^-1 sum_{j != k} cos(t (X_j - X_k)); unbiased for |f(t)|^2.
double ecf_sq_unbiased(const Sample& s, double t);

/// min(1, V_{m-1} / |t|^m), a majorant of |f(t)|.
double cf_envelope(const DensityModel& d, int m, double t);

/// Majorant of |1 - phi(t)| for a density kernel: the tightest of
/// {mu1 |t|, mu2 t^2 / 2, 2}, or mu1^alpha 2^(1 - alpha) |t|^alpha when alpha
/// is given.
double one_minus_cf_bound(const KernelModel& k, double t, std::optional<double> alpha = {});

/// Upper bound on int_T^inf |f(t)| dt from the cutoff, supersmooth or
/// variation constants; +inf when nothing certifies integrability.
double cf_abs_tail_bound(const DensityModel& d, double T);
/// Upper bound on int_T^inf |f(t)|^2 dt.
double cf_sq_tail_bound(const DensityModel& d, double T);
/// sup over |t| >= T of |f(t)|.
double cf_sup_beyond(const DensityModel& d, double T);

} // namespace kdecf
