#include "kdecf/kernels.hpp"

#include "kdecf/errors.hpp"
#include "kdecf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kdecf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inv_sqrt_2pi = 0.3989422804014327;

KernelModel gaussian()
{
    KernelModel k;
    k.name = "gaussian";
    k.eval = [](double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); };
    k.cf = [](double t) { return std::exp(-0.5 * t * t); };
    k.sq_cf = [](double s) { return std::exp(-0.25 * s * s) / (2.0 * std::sqrt(pi)); };
    k.self_conv = [](double u) { return std::exp(-0.25 * u * u) / (2.0 * std::sqrt(pi)); };
    k.cf_tail = [](double u) { return u <= 0.0 ? 1.0 : std::exp(-0.5 * u * u); };
    k.mu1 = std::sqrt(2.0 / pi);
    k.mu2 = 1.0;
    k.roughness = 1.0 / (2.0 * std::sqrt(pi));
    k.a_value = inv_sqrt_2pi;
    return k;
}

double epanechnikov_cf(double t)
{
    t = std::abs(t);
    if (t < 0.05) {
        double t2 = t * t;
        return 1.0 - t2 / 10.0 + t2 * t2 / 280.0 - t2 * t2 * t2 / 15120.0;
    }
    return 3.0 * (std::sin(t) - t * std::cos(t)) / (t * t * t);
}

double epanechnikov_sq_cf(double s)
{
    s = std::abs(s);
    if (s < 0.25) {
        double s2 = s * s;
        return 0.6 - 3.0 * s2 / 70.0 + s2 * s2 / 840.0 - s2 * s2 * s2 / 55440.0
             + s2 * s2 * s2 * s2 / 5765760.0;
    }
    double s5 = s * s * s * s * s;
    return 9.0 * (3.0 * std::sin(s) - 3.0 * s * std::cos(s) - s * s * std::sin(s)) / s5;
}

// A(K) for kernels whose |cf| decays like c |cos t| / t^2: integrate panel by
// panel out to a large cutoff and add the averaged tail c (2/pi) / T.
double abs_cf_integral_slow(const std::function<double(double)>& cf, double tail_coef)
{
    const double cutoff = 4000.0 * pi;
    auto r = quad::integrate_abs(cf, 0.0, cutoff, 16000);
    double tail = tail_coef * (2.0 / pi) / cutoff;
    return (2.0 * (r.value + tail)) / (2.0 * pi);
}

KernelModel epanechnikov()
{
    KernelModel k;
    k.name = "epanechnikov";
    k.eval = [](double x) { return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0; };
    k.cf = epanechnikov_cf;
    k.sq_cf = epanechnikov_sq_cf;
    k.self_conv = [](double u) {
        double a = std::abs(u);
        if (a >= 2.0)
            return 0.0;
        double d = 2.0 - a;
        return 3.0 / 160.0 * d * d * d * (a * a + 6.0 * a + 4.0);
    };
    k.cf_tail = [](double u) { return u <= 1.0 ? 1.0 : std::min(1.0, 3.0 * (1.0 + u) / (u * u * u)); };
    k.mu1 = 0.375;
    k.mu2 = 0.2;
    k.roughness = 0.6;
    static const double a_value = abs_cf_integral_slow(epanechnikov_cf, 3.0);
    k.a_value = a_value;
    return k;
}

KernelModel uniform()
{
    KernelModel k;
    k.name = "uniform";
    k.eval = [](double x) { return std::abs(x) <= 1.0 ? 0.5 : 0.0; };
    k.cf = [](double t) {
        if (std::abs(t) < 1e-4)
            return 1.0 - t * t / 6.0;
        return std::sin(t) / t;
    };
    k.sq_cf = [](double s) {
        if (std::abs(s) < 1e-4)
            return 0.5 * (1.0 - s * s / 6.0);
        return std::sin(s) / (2.0 * s);
    };
    k.self_conv = [](double u) { return std::max(0.0, 2.0 - std::abs(u)) / 4.0; };
    k.cf_tail = [](double u) { return u <= 1.0 ? 1.0 : 1.0 / u; };
    k.mu1 = 0.5;
    k.mu2 = 1.0 / 3.0;
    k.roughness = 0.5;
    k.a_value = kInf; // |sin t / t| is not integrable
    return k;
}

KernelModel sinc()
{
    KernelModel k;
    k.name = "sinc";
    k.eval = sinc_value;
    k.cf = [](double t) { return std::abs(t) <= 1.0 ? 1.0 : 0.0; };
    k.sq_cf = [](double s) { return std::max(0.0, 2.0 - std::abs(s)) / (2.0 * pi); };
    k.self_conv = sinc_value; // cf^2 = cf
    k.cf_tail = [](double u) { return u <= 1.0 ? 1.0 : 0.0; };
    k.roughness = 1.0 / pi;
    k.a_value = 1.0 / pi;
    k.cf_support = 1.0;
    k.is_density = false;
    k.is_sinc = true;
    return k;
}

} // namespace

double sinc_value(double x)
{
    if (std::abs(x) < 1e-8)
        return 1.0 / pi - x * x / (6.0 * pi);
    return std::sin(x) / (pi * x);
}

KernelModel make_builtin(std::string_view name)
{
    if (name == "gaussian" || name == "normal")
        return gaussian();
    if (name == "epanechnikov")
        return epanechnikov();
    if (name == "uniform" || name == "box")
        return uniform();
    if (name == "sinc")
        return sinc();
    throw ConfigError("unknown kernel '" + std::string(name)
                      + "' (expected gaussian, epanechnikov, uniform or sinc)");
}

const KernelModel& sinc_kernel()
{
    static const KernelModel k = sinc();
    return k;
}

KernelModel make_custom(std::string name, std::function<double(double)> eval,
                        std::function<double(double)> cf, double support)
{
    KernelModel k;
    k.name = std::move(name);
    k.eval = eval;
    k.cf = cf;

    const double lim = std::isfinite(support) ? support : 60.0;
    const std::size_t panels = 64;
    auto moment = [&](int p) {
        auto r = quad::integrate_panels(
            [&](double x) { return std::pow(std::abs(x), p) * eval(x); }, -lim, lim, panels);
        return r.value;
    };
    double mass = moment(0);
    bool nonneg = true;
    for (int i = 0; i <= 400; ++i)
        if (eval(-lim + 2.0 * lim * i / 400.0) < 0.0)
            nonneg = false;
    k.is_density = nonneg && std::abs(mass - 1.0) < 1e-6;
    if (k.is_density) {
        k.mu1 = moment(1);
        k.mu2 = moment(2);
    }
    k.roughness = quad::integrate_panels([&](double x) { return eval(x) * eval(x); }, -lim, lim, panels).value;

    const double tlim = 200.0;
    auto abs_cf = quad::integrate_abs(cf, 0.0, tlim, 4000);
    double edge = std::abs(cf(tlim));
    k.a_value = edge < 1e-10 ? abs_cf.value / pi : kInf;

    auto sq = [eval, lim](double s) {
        return quad::integrate_panels([&](double x) { return eval(x) * eval(x) * std::cos(s * x); },
                                      -lim, lim, 64)
            .value;
    };
    k.sq_cf = sq;
    k.self_conv = [cf](double u) {
        auto r = quad::integrate_panels([&](double s) { return cf(s) * cf(s) * std::cos(u * s); },
                                        0.0, 200.0, 400);
        return r.value / pi;
    };
    k.cf_tail = [](double) { return 1.0; };
    return k;
}

double scaled_eval(const KernelModel& k, double h, double x)
{
    if (!(h > 0.0))
        throw DomainError("bandwidth must be positive");
    return k.eval(x / h) / h;
}

} // namespace kdecf
