#include "kdecf/selector.hpp"

#include "kdecf/bounds.hpp"
#include "kdecf/errors.hpp"
#include "kdecf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace kdecf {

namespace {

constexpr double pi = std::numbers::pi;

// Density model carrying only the constants a bound formula reads.
DensityModel constants_only(std::map<int, double> variation, std::optional<double> a)
{
    DensityModel d;
    d.name = "constants";
    d.variation = std::move(variation);
    d.sup_bound = a;
    if (a)
        d.unimodal = true;
    return d;
}

double positive(const std::optional<double>& v, const char* name)
{
    if (!v)
        throw ConfigError(std::string("missing constant ") + name);
    if (!(*v > 0.0) || !std::isfinite(*v))
        throw ConfigError(std::string("constant ") + name + " must be positive");
    return *v;
}

// Sum over ordered pairs j != k of w1 (K*K)_h(d) + w2 K_h(d).
double pair_sum(const Sample& s, const KernelModel& k, double h, double w_conv, double w_kernel)
{
    auto xs = s.values();
    const std::size_t n = xs.size();
    const bool gaussian = k.name == "gaussian";
    const double reach = 40.0 * h;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j + 1; i < n; ++i) {
            double d = xs[i] - xs[j];
            if (gaussian && d > reach)
                break;
            double u = d / h;
            total += w_conv * k.self_conv(u) / h + w_kernel * k.eval(u) / h;
        }
    }
    return 2.0 * total;
}

double parametric_criterion(const KernelModel& k, double h, double sigma, std::size_t n, CvForm form)
{
    const double N = static_cast<double>(n);
    double bias;
    double weighted;
    if (k.name == "gaussian") {
        const double sq = sigma * sigma;
        const double sp = std::sqrt(pi);
        // int exp(-s^2 t^2) (1 - exp(-h^2 t^2 / 2))^2 dt with the h-free part removed
        bias = sp * (-2.0 / std::sqrt(sq + 0.5 * h * h) + 1.0 / std::sqrt(sq + h * h));
        weighted = sp / std::sqrt(sq + h * h);
    } else if (sigma > 0.0) {
        const double T = 7.0 / sigma;
        const auto panels = static_cast<std::size_t>(8 + std::ceil(T * h / pi));
        auto b = [&](double t) {
            double p = k.cf(h * t);
            return std::exp(-sigma * sigma * t * t) * (p * p - 2.0 * p);
        };
        auto w = [&](double t) {
            double p = k.cf(h * t);
            return std::exp(-sigma * sigma * t * t) * p * p;
        };
        bias = 2.0 * quad::integrate_panels(b, 0.0, T, panels).value;
        weighted = 2.0 * quad::integrate_panels(w, 0.0, T, panels).value;
    } else {
        // q = 1: int phi(ht) dt = 2 pi K(0) / h and int phi(ht)^2 dt = 2 pi R(K) / h
        bias = 2.0 * pi * (k.roughness - 2.0 * k.eval(0.0)) / h;
        weighted = 2.0 * pi * k.roughness / h;
    }
    double value = bias + 2.0 * pi * k.roughness / (N * h);
    if (form == CvForm::full)
        value -= weighted / N;
    return value / (2.0 * pi);
}

} // namespace

double normal_rule_constant()
{
    static const double c = amise_conventional(make_normal(0.0, 1.0), make_builtin("gaussian"), 1).h;
    return c;
}

SelectorResult rule_of_thumb_normal(double sigma_hat, std::size_t n)
{
    if (!(sigma_hat > 0.0))
        throw ConfigError("sigma_hat must be positive");
    if (n < 1)
        throw ConfigError("n must be positive");
    SelectorResult r;
    r.method = "rot-normal";
    r.n = n;
    r.kernel = "gaussian";
    r.h = normal_rule_constant() * sigma_hat * std::pow(static_cast<double>(n), -0.2);
    return r;
}

SelectorResult bound_rule(BoundRuleKind kind, const BoundRuleConstants& c, const KernelModel& k, std::size_t n)
{
    if (!k.is_density)
        throw ConfigError("bound rules need a density kernel");
    if (n < 1)
        throw ConfigError("n must be positive");
    BoundResult b;
    SelectorResult r;
    if (kind == BoundRuleKind::mise_thm1) {
        auto d = constants_only({{2, positive(c.v2, "v2")}}, std::nullopt);
        b = conventional_mise_bound(d, k, 2, 1.0, n);
        r.method = "bound-mise";
    } else {
        auto d = constants_only({{3, positive(c.v3, "v3")}}, positive(c.a, "a"));
        b = conventional_maxmse_bound(d, k, 3, 1.0, n);
        r.method = "bound-maxmse";
    }
    if (!b.optimal)
        throw ConfigError("bound rule not applicable: " + b.failed_assumptions());
    r.h = b.optimal->h_star;
    r.n = n;
    r.kernel = k.name;
    return r;
}

std::vector<double> default_h_grid(const Sample& s, std::size_t points)
{
    const double sd = s.sd();
    if (!(sd >= 1e-12))
        throw ConfigError("sample is degenerate (sd < 1e-12); supply an explicit bandwidth grid");
    const double base = sd * std::pow(static_cast<double>(s.size()), -0.2);
    const double lo = std::log(0.05 * base);
    const double hi = std::log(3.0 * base);
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    return g;
}

double cv_criterion(const Sample& s, const KernelModel& k, double h, const CvOptions& opt)
{
    if (!(h > 0.0))
        throw DomainError("bandwidth must be positive");
    const std::size_t n = s.size();
    const double N = static_cast<double>(n);
    if (opt.q == QEstimator::parametric) {
        double sigma = opt.sigma_hat ? *opt.sigma_hat : s.sd();
        return parametric_criterion(k, h, sigma, n, opt.form);
    }
    if (n < 2)
        throw ConfigError("unbiased criterion needs at least two observations");
    const double conv_weight = opt.form == CvForm::full ? 1.0 - 1.0 / N : 1.0;
    return k.roughness / (N * h) + pair_sum(s, k, h, conv_weight, -2.0) / (N * (N - 1.0));
}

SelectorResult cv_bandwidth(const Sample& s, const KernelModel& k, std::span<const double> h_grid,
                            const CvOptions& opt)
{
    if (opt.q == QEstimator::unbiased && s.size() < 2)
        throw ConfigError("cross-validation needs at least two observations");
    if (h_grid.empty())
        throw ConfigError("bandwidth grid is empty");
    std::vector<double> grid(h_grid.begin(), h_grid.end());
    for (double h : grid)
        if (!(h > 0.0) || !std::isfinite(h))
            throw ConfigError("bandwidth grid must hold positive finite values");

    std::vector<double> q(grid.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(grid.size(), std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < grid.size(); i += workers)
                    q[i] = cv_criterion(s, k, grid[i], opt);
            });
    }

    SelectorResult r;
    r.method = opt.q == QEstimator::unbiased ? "ucv" : "cv-parametric";
    r.n = s.size();
    r.kernel = k.name;
    r.q_estimator = opt.q == QEstimator::unbiased ? "unbiased" : "parametric";
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        r.curve.emplace_back(grid[i], q[i]);
        if (q[i] < q[best])
            best = i;
    }
    r.h = grid[best];
    if (s.size() < 2 || s.sd() < 1e-12) {
        r.degenerate = true;
        r.warning = "degenerate sample: criterion decreases without bound as h shrinks";
    }
    return r;
}

SelectorResult cv_bandwidth(const Sample& s, const KernelModel& k, const CvOptions& opt)
{
    if (opt.q == QEstimator::unbiased && s.size() < 2)
        throw ConfigError("cross-validation needs at least two observations");
    auto grid = default_h_grid(s);
    return cv_bandwidth(s, k, grid, opt);
}

namespace {

BoundResult plan_bound(const PlanRequest& req, const KernelModel& k, std::size_t n)
{
    if (n < 1)
        throw ConfigError("n must be positive");
    BoundResult b;
    switch (req.estimator) {
    case PlanEstimator::kernel:
        if (!k.is_density)
            throw ConfigError("kernel planning needs a density kernel");
        if (req.target == PlanTarget::mise)
            b = conventional_mise_bound(constants_only({{2, positive(req.v2, "v2")}}, std::nullopt), k, 2, 1.0, n);
        else
            b = conventional_maxmse_bound(constants_only({{3, positive(req.v3, "v3")}}, positive(req.a, "a")), k, 3,
                                          1.0, n);
        break;
    case PlanEstimator::sinc_nonsmooth:
        if (req.target != PlanTarget::mise)
            throw ConfigError("no sup-MSE corollary for the nonsmooth sinc regime");
        b = sinc_mise_bound(constants_only({{0, positive(req.v, "v")}}, std::nullopt), {SincRegime::nonsmooth}, 1.0, n);
        break;
    case PlanEstimator::sinc_smooth: {
        auto d = constants_only({{req.m, positive(req.v, "v")}}, std::nullopt);
        if (req.target == PlanTarget::mise) {
            if (req.m < 1)
                throw ConfigError("smooth sinc planning needs m >= 1");
            b = sinc_mise_bound(d, {SincRegime::smooth, req.m}, 1.0, n);
        } else {
            if (req.m < 2)
                throw ConfigError("smooth sinc sup-MSE planning needs m >= 2");
            b = sinc_maxmse_bound(d, {SincRegime::smooth, req.m}, 1.0, n);
        }
        break;
    }
    }
    if (!b.optimal)
        throw ConfigError("corollary not applicable: " + b.failed_assumptions());
    return b;
}

} // namespace

double planned_bound(const PlanRequest& req, const KernelModel& k, std::size_t n)
{
    return plan_bound(req, k, n).optimal->minimized;
}

PlanResult plan_sample_size(const PlanRequest& req, const KernelModel& k)
{
    if (!(req.epsilon > 0.0) || !std::isfinite(req.epsilon))
        throw ConfigError("epsilon must be positive");
    const double c = planned_bound(req, k, 1);
    // the minimized bound is c n^-rate; recover the rate from a second point
    const double rate = std::log(c / planned_bound(req, k, 1024)) / std::log(1024.0);
    double guess = std::ceil(std::pow(c / req.epsilon, 1.0 / rate) * (1.0 - 1e-12));
    if (!(guess < 1e15))
        throw InfeasibleError("required sample size exceeds 1e15");
    std::size_t n = static_cast<std::size_t>(std::max(1.0, guess));
    while (n > 1 && planned_bound(req, k, n - 1) <= req.epsilon)
        --n;
    while (planned_bound(req, k, n) > req.epsilon)
        ++n;

    auto b = plan_bound(req, k, n);
    PlanResult r;
    r.n0 = n;
    r.bound = b.optimal->minimized;
    r.h = b.optimal->h_star;
    r.theorem_id = b.theorem_id;
    return r;
}

} // namespace kdecf
