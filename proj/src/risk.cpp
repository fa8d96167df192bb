#include "kdecf/risk.hpp"

#include "kdecf/errors.hpp"
#include "kdecf/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

namespace kdecf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kTailTol = 1e-15;
constexpr double kMaxPanels = 2e5;

std::size_t panels_for(double a, double b, double freq)
{
    double p = 8.0 + std::ceil((b - a) * freq / pi);
    return static_cast<std::size_t>(std::min(p, kMaxPanels));
}

// Largest t we are prepared to integrate to, given the oscillation rate.
double t_cap(double freq)
{
    return std::min(1e7, std::max(200.0, kMaxPanels * pi / std::max(freq, 1e-12)));
}

// Smallest T on a geometric ladder from `start` with tail(T) <= tol, or
// nullopt when the cap is reached first.
template <typename Tail>
std::optional<double> find_cutoff(Tail tail, double tol, double start, double cap)
{
    double T = std::max(start, 1e-3);
    while (T <= cap) {
        if (tail(T) <= tol)
            return T;
        T *= 1.25;
    }
    return std::nullopt;
}

std::vector<double> breakpoints(const DensityModel& d, const KernelModel& k, double h)
{
    std::vector<double> b;
    if (std::isfinite(k.cf_support)) {
        b.push_back(k.cf_support / h);
        b.push_back(2.0 * k.cf_support / h);
    }
    if (d.cf_cutoff)
        b.push_back(*d.cf_cutoff);
    return b;
}

double f_sq(const DensityModel& d, double t)
{
    return std::norm(d.cf(t));
}

// Real part of exp(-i t x) f(t).
double re_shifted(const DensityModel& d, double t, double x)
{
    auto f = d.cf(t);
    return f.real() * std::cos(t * x) + f.imag() * std::sin(t * x);
}

quad::Result scaled(quad::Result r, double c)
{
    return {r.value * c, r.error * std::abs(c)};
}

quad::Result bias_impl(const DensityModel& d, const KernelModel& k, double h, double x)
{
    auto g = [&](double t) { return re_shifted(d, t, x) * (k.cf(h * t) - 1.0); };
    const double freq = std::abs(x) + d.cf_frequency + h;
    const auto brk = breakpoints(d, k, h);
    double T;
    double tail = 0.0;
    if (d.cf_cutoff) {
        T = *d.cf_cutoff;
    } else {
        auto tail_fn = [&](double s) { return (1.0 + k.cf_tail(h * s)) * cf_abs_tail_bound(d, s); };
        auto found = find_cutoff(tail_fn, kTailTol, 1.0, t_cap(freq));
        T = found ? *found : t_cap(freq);
        tail = tail_fn(T);
        if (!std::isfinite(tail))
            throw ConfigError("characteristic function of '" + d.name
                              + "' has no certified integrable tail; pointwise bias is unavailable");
    }
    auto r = quad::integrate_panels(g, 0.0, T, panels_for(0.0, T, freq), brk);
    r.error += tail;
    return scaled(r, 1.0 / pi);
}

double density_at(const DensityModel& d, double x)
{
    if (d.pdf)
        return d.pdf(x);
    auto g = [&](double t) { return re_shifted(d, t, x); };
    const double freq = std::abs(x) + d.cf_frequency;
    double T = d.cf_cutoff ? *d.cf_cutoff
                           : find_cutoff([&](double s) { return cf_abs_tail_bound(d, s); }, kTailTol, 1.0,
                                         t_cap(freq))
                                 .value_or(t_cap(freq));
    return quad::integrate_panels(g, 0.0, T, panels_for(0.0, T, freq)).value / pi;
}

// (K_h^2 * p)(x) = (2 pi)^-1 int exp(-i t x) f(t) kappa(h t) / h dt
quad::Result second_moment_impl(const DensityModel& d, const KernelModel& k, double h, double x)
{
    auto g = [&](double t) { return re_shifted(d, t, x) * k.sq_cf(h * t) / h; };
    const double freq = std::abs(x) + d.cf_frequency + h;
    double T;
    double tail = 0.0;
    if (d.cf_cutoff) {
        T = *d.cf_cutoff;
    } else {
        auto tail_fn = [&](double s) { return k.roughness / h * cf_abs_tail_bound(d, s); };
        auto found = find_cutoff(tail_fn, kTailTol, 1.0, t_cap(freq));
        T = found ? *found : t_cap(freq);
        tail = tail_fn(T);
    }
    if (std::isfinite(k.cf_support))
        T = std::min(T, 2.0 * k.cf_support / h);
    if (!std::isfinite(tail))
        throw ConfigError("characteristic function of '" + d.name + "' has no certified integrable tail");
    auto r = quad::integrate_panels(g, 0.0, T, panels_for(0.0, T, freq), breakpoints(d, k, h));
    r.error += tail;
    return scaled(r, 1.0 / pi);
}

// int phi(h t)^2 |f(t)|^2 dt over the real line
quad::Result kernel_weighted_f_sq(const DensityModel& d, const KernelModel& k, double h)
{
    auto g = [&](double t) {
        double p = k.cf(h * t);
        return p * p * f_sq(d, t);
    };
    const double freq = 2.0 * d.cf_frequency + h;
    const auto brk = breakpoints(d, k, h);
    double T;
    double tail = 0.0;
    if (d.cf_cutoff) {
        T = *d.cf_cutoff;
    } else {
        auto tail_fn = [&](double s) {
            double c = k.cf_tail(h * s);
            return c * c * cf_sq_tail_bound(d, s);
        };
        auto found = find_cutoff(tail_fn, kTailTol, 1.0, t_cap(freq));
        T = found ? *found : t_cap(freq);
        tail = tail_fn(T);
    }
    if (std::isfinite(k.cf_support))
        T = std::min(T, k.cf_support / h);
    auto r = quad::integrate_panels(g, 0.0, T, panels_for(0.0, T, freq), brk);
    r.error += tail;
    return scaled(r, 2.0);
}

void finish(RiskReport& rep)
{
    rep.mise = std::max(rep.mise, 0.0);
    rep.degraded = !(rep.quad_error <= 1e-6 * std::max(1.0, rep.mise));
}

void check_h(double h)
{
    if (!(h > 0.0))
        throw DomainError("bandwidth must be positive");
}

} // namespace

quad::Result bias_sq_integral(const DensityModel& d, const KernelModel& k, double h)
{
    check_h(h);
    auto g = [&](double t) {
        double u = 1.0 - k.cf(h * t);
        return f_sq(d, t) * u * u;
    };
    const double freq = 2.0 * d.cf_frequency + h;
    const auto brk = breakpoints(d, k, h);
    if (d.cf_cutoff) {
        double T = *d.cf_cutoff;
        return scaled(quad::integrate_panels(g, 0.0, T, panels_for(0.0, T, freq), brk), 2.0);
    }
    const double cap = t_cap(freq);
    auto direct_tail = [&](double s) {
        double c = k.cf_tail(h * s);
        return (1.0 + c) * (1.0 + c) * cf_sq_tail_bound(d, s);
    };
    if (auto T = find_cutoff(direct_tail, kTailTol, 1.0, cap)) {
        auto r = quad::integrate_panels(g, 0.0, *T, panels_for(0.0, *T, freq), brk);
        r.error += direct_tail(*T);
        return scaled(r, 2.0);
    }
    if (d.roughness) {
        // int_T^inf |f|^2 (1 - phi)^2 = int_T^inf |f|^2 - int_T^inf |f|^2 (2 phi - phi^2)
        auto cross = [&](double s) {
            double c = k.cf_tail(h * s);
            return (2.0 * c + c * c) * cf_sq_tail_bound(d, s);
        };
        double T = find_cutoff(cross, 1e-13, 1.0, cap).value_or(cap);
        auto r = quad::integrate_panels(g, 0.0, T, panels_for(0.0, T, freq), brk);
        auto mass = quad::integrate_panels([&](double t) { return f_sq(d, t); }, 0.0, T,
                                           panels_for(0.0, T, freq), brk);
        quad::Result out{r.value + (pi * *d.roughness - mass.value), r.error + mass.error + cross(T)};
        return scaled(out, 2.0);
    }
    auto r = quad::integrate_panels(g, 0.0, cap, panels_for(0.0, cap, freq), brk);
    r.error += direct_tail(cap);
    return scaled(r, 2.0);
}

quad::Result abs_bias_integral(const DensityModel& d, const KernelModel& k, double h)
{
    check_h(h);
    auto g = [&](double t) { return d.cf_abs(t) * std::abs(1.0 - k.cf(h * t)); };
    const double freq = d.cf_frequency + h;
    const auto brk = breakpoints(d, k, h);
    if (d.cf_cutoff) {
        double T = *d.cf_cutoff;
        return scaled(quad::integrate_panels(g, 0.0, T, panels_for(0.0, T, freq), brk), 2.0);
    }
    auto tail_fn = [&](double s) { return (1.0 + k.cf_tail(h * s)) * cf_abs_tail_bound(d, s); };
    const double cap = t_cap(freq);
    double T = find_cutoff(tail_fn, kTailTol, 1.0, cap).value_or(cap);
    double tail = tail_fn(T);
    if (!std::isfinite(tail))
        return {kInf, kInf};
    auto r = quad::integrate_panels(g, 0.0, T, panels_for(0.0, T, freq), brk);
    r.error += tail;
    return scaled(r, 2.0);
}

quad::Result sinc_tail_sq_integral(const DensityModel& d, double h)
{
    check_h(h);
    const double a = 1.0 / h;
    if (d.cf_cutoff && *d.cf_cutoff <= a)
        return {0.0, 0.0};
    auto g = [&](double t) { return f_sq(d, t); };
    const double freq = 2.0 * d.cf_frequency;
    std::vector<double> brk;
    if (d.cf_cutoff) {
        double T = *d.cf_cutoff;
        return scaled(quad::integrate_panels(g, a, T, panels_for(a, T, freq)), 2.0);
    }
    const double cap = a + t_cap(freq);
    auto tail_fn = [&](double s) { return cf_sq_tail_bound(d, s); };
    if (auto T = find_cutoff(tail_fn, kTailTol, a, cap)) {
        auto r = quad::integrate_panels(g, a, *T, panels_for(a, *T, freq));
        r.error += tail_fn(*T);
        return scaled(r, 2.0);
    }
    if (d.roughness) {
        auto head = quad::integrate_panels(g, 0.0, a, panels_for(0.0, a, freq));
        return scaled({pi * *d.roughness - head.value, head.error + 1e-15}, 2.0);
    }
    auto r = quad::integrate_panels(g, a, cap, panels_for(a, cap, freq));
    r.error += tail_fn(cap);
    return scaled(r, 2.0);
}

quad::Result sinc_tail_abs_integral(const DensityModel& d, double h)
{
    check_h(h);
    const double a = 1.0 / h;
    if (d.cf_cutoff && *d.cf_cutoff <= a)
        return {0.0, 0.0};
    auto g = [&](double t) { return d.cf_abs(t); };
    const double freq = d.cf_frequency;
    if (d.cf_cutoff) {
        double T = *d.cf_cutoff;
        return scaled(quad::integrate_panels(g, a, T, panels_for(a, T, freq)), 2.0);
    }
    const double cap = a + t_cap(freq);
    auto tail_fn = [&](double s) { return cf_abs_tail_bound(d, s); };
    double T = find_cutoff(tail_fn, kTailTol, a, cap).value_or(cap);
    double tail = tail_fn(T);
    if (!std::isfinite(tail))
        return {kInf, kInf};
    auto r = quad::integrate_panels(g, a, T, panels_for(a, T, freq));
    r.error += tail;
    return scaled(r, 2.0);
}

double exact_bias(const DensityModel& d, const KernelModel& k, double h, double x)
{
    check_h(h);
    return bias_impl(d, k, h, x).value;
}

double exact_mse(const DensityModel& d, const KernelModel& k, double h, std::size_t n, double x)
{
    check_h(h);
    if (n < 1)
        throw DomainError("sample size must be positive");
    double bias = bias_impl(d, k, h, x).value;
    double mean = density_at(d, x) + bias;
    double second = second_moment_impl(d, k, h, x).value;
    return bias * bias + (second - mean * mean) / static_cast<double>(n);
}

double max_exact_mse(const DensityModel& d, const KernelModel& k, double h, std::size_t n,
                     std::span<const double> xs)
{
    double best = 0.0;
    for (double x : xs)
        best = std::max(best, exact_mse(d, k, h, n, x));
    return best;
}

RiskReport exact_mise(const DensityModel& d, const KernelModel& k, double h, std::size_t n,
                      std::span<const double> xs)
{
    if (k.is_sinc)
        throw UnsupportedKernelError("exact_mise handles density kernels; use sinc_exact_mise for sinc");
    if (!k.is_density)
        throw UnsupportedKernelError("kernel '" + k.name + "' is not a probability density");
    check_h(h);
    if (n < 1)
        throw DomainError("sample size must be positive");

    auto bias_term = bias_sq_integral(d, k, h);
    auto weighted = kernel_weighted_f_sq(d, k, h);
    // int phi(ht)^2 (1 - |f|^2) dt = 2 pi R(K) / h - int phi(ht)^2 |f|^2 dt
    double var_term = 2.0 * pi * k.roughness / h - weighted.value;

    RiskReport rep;
    rep.inputs = {d.name, k.name, h, n};
    rep.mise = (bias_term.value + var_term / static_cast<double>(n)) / (2.0 * pi);
    rep.quad_error = (bias_term.error + weighted.error / static_cast<double>(n)) / (2.0 * pi);
    for (double x : xs) {
        rep.bias_at[x] = exact_bias(d, k, h, x);
        rep.mse_at[x] = exact_mse(d, k, h, n, x);
    }
    finish(rep);
    return rep;
}

RiskReport sinc_exact_mise(const DensityModel& d, double h, std::size_t n)
{
    check_h(h);
    if (n < 1)
        throw DomainError("sample size must be positive");
    const double a = 1.0 / h;
    auto tail = sinc_tail_sq_integral(d, h);
    double top = d.cf_cutoff ? std::min(a, *d.cf_cutoff) : a;
    auto head = quad::integrate_panels([&](double t) { return f_sq(d, t); }, 0.0, top,
                                       panels_for(0.0, top, 2.0 * d.cf_frequency));
    // int_{-1/h}^{1/h} (1 - |f|^2) dt
    double var_term = 2.0 * a - 2.0 * head.value;

    RiskReport rep;
    rep.inputs = {d.name, "sinc", h, n};
    rep.mise = (tail.value + var_term / static_cast<double>(n)) / (2.0 * pi);
    rep.quad_error = (tail.error + 2.0 * head.error / static_cast<double>(n)) / (2.0 * pi);
    finish(rep);
    return rep;
}

std::vector<double> mse_grid(const DensityModel& d, std::size_t points)
{
    auto [lo, hi] = d.support;
    if (d.pdf) {
        const std::size_t scan = 4001;
        auto xs = linspace(lo, hi, scan);
        double top = 0.0;
        for (double x : xs)
            top = std::max(top, d.pdf(x));
        std::size_t first = 0;
        std::size_t last = scan - 1;
        while (first < last && d.pdf(xs[first]) < 1e-4 * top)
            ++first;
        while (last > first && d.pdf(xs[last]) < 1e-4 * top)
            --last;
        lo = xs[first > 0 ? first - 1 : 0];
        hi = xs[std::min(last + 1, scan - 1)];
    }
    return linspace(lo, hi, std::max<std::size_t>(points, 2));
}

McResult mc_mise(const DensityModel& d, const KernelModel& k, double h, std::size_t n, std::size_t reps,
                 std::uint64_t seed)
{
    check_h(h);
    if (!d.sampler || !d.pdf)
        throw ConfigError("density '" + d.name + "' cannot be sampled or has no pdf");
    if (n < 1 || reps < 1)
        throw DomainError("n and reps must be positive");

    const double lo = d.support.first - 4.0 * h;
    const double hi = d.support.second + 4.0 * h;
    const double dx = std::min(h, 0.1 * (d.support.second - d.support.first)) / 10.0;
    const auto points = static_cast<std::size_t>(std::ceil((hi - lo) / dx)) + 1;
    const auto xs = linspace(lo, hi, points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    std::vector<double> truth(points);
    for (std::size_t i = 0; i < points; ++i)
        truth[i] = d.pdf(xs[i]);

    std::vector<double> ise(reps);
    auto work = [&](std::size_t first, std::size_t last) {
        std::vector<double> sq(points);
        for (std::size_t r = first; r < last; ++r) {
            Rng rng(seed + r);
            Sample s = draw_sample(d, n, rng);
            for (std::size_t i = 0; i < points; ++i) {
                double e = kde_eval(s, k, h, xs[i]) - truth[i];
                sq[i] = e * e;
            }
            ise[r] = quad::trapezoid(sq, step);
        }
    };
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(reps, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    const std::size_t chunk = (reps + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t first = w * chunk;
        std::size_t last = std::min(reps, first + chunk);
        if (first < last)
            pool.emplace_back(work, first, last);
    }
    for (auto& t : pool)
        t.join();

    McResult out;
    out.reps = reps;
    double sum = 0.0;
    for (double v : ise)
        sum += v;
    out.estimate = sum / static_cast<double>(reps);
    if (reps > 1) {
        double ss = 0.0;
        for (double v : ise)
            ss += (v - out.estimate) * (v - out.estimate);
        out.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
    }
    return out;
}

} // namespace kdecf
