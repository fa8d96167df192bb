#include "kdecf/bounds.hpp"

#include "kdecf/errors.hpp"
#include "kdecf/quadrature.hpp"
#include "kdecf/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kdecf {

namespace {

constexpr double pi = std::numbers::pi;

class Builder {
public:
    Builder(std::string id, RiskKind kind, bool sinc, std::size_t n)
    {
        r_.theorem_id = std::move(id);
        r_.kind = kind;
        r_.sinc = sinc;
        r_.n = n;
    }

    bool require(const std::string& name, bool ok, bool machine_checked = true)
    {
        r_.assumptions.push_back({name, ok, machine_checked});
        ok_ = ok_ && ok;
        return ok;
    }

    bool ok() const { return ok_; }

    BoundResult& result() { return r_; }

    BoundResult finish(double value, std::optional<Optimal> opt = {})
    {
        if (ok_ && std::isfinite(value)) {
            r_.bound = std::max(value, 0.0);
            r_.optimal = opt;
        }
        return r_;
    }

    BoundResult inapplicable() { return r_; }

private:
    BoundResult r_;
    bool ok_ = true;
};

std::optional<double> variation(const DensityModel& d, int m)
{
    auto it = d.variation.find(m);
    if (it == d.variation.end() || !std::isfinite(it->second) || it->second <= 0.0)
        return std::nullopt;
    return it->second;
}

std::string vname(int m)
{
    return "V(p^(" + std::to_string(m) + ")) supplied";
}

void check_positive(double h, const char* what)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw DomainError(std::string(what) + " must be positive and finite");
}

void check_n(std::size_t n)
{
    if (n < 1)
        throw DomainError("sample size must be positive");
}

double dn(std::size_t n)
{
    return static_cast<double>(n);
}

} // namespace

std::string to_string(RiskKind kind)
{
    return kind == RiskKind::mise ? "mise" : "max_mse";
}

std::string to_string(SincRegime regime)
{
    switch (regime) {
    case SincRegime::nonsmooth: return "nonsmooth";
    case SincRegime::nonsmooth_unimodal: return "nonsmooth_unimodal";
    case SincRegime::smooth: return "smooth";
    case SincRegime::supersmooth: return "supersmooth";
    case SincRegime::bandlimited: return "bandlimited";
    case SincRegime::generic: return "generic";
    }
    return "generic";
}

std::string BoundResult::failed_assumptions() const
{
    std::string out;
    for (const auto& a : assumptions) {
        if (a.satisfied)
            continue;
        if (!out.empty())
            out += ", ";
        out += a.name;
    }
    return out;
}

BoundResult lemma1_mse_bound(const DensityModel& d, const KernelModel& k, double h, std::size_t n)
{
    check_positive(h, "bandwidth");
    check_n(n);
    Builder b("lemma1", RiskKind::max_mse, false, n);
    b.result().h0 = h;
    b.result().h_used = h;
    b.require("kernel is a density", k.is_density);
    b.require("p bounded (a supplied)", d.sup_bound.has_value(), false);
    b.require("A(K) finite", std::isfinite(k.a_value));
    if (!b.ok())
        return b.inapplicable();
    auto bias = abs_bias_integral(d, k, h);
    if (!b.require("|f| integrable", std::isfinite(bias.value)))
        return b.inapplicable();
    double first = bias.value / (2.0 * pi);
    return b.finish(first * first + 2.0 * *d.sup_bound * k.a_value / (dn(n) * h));
}

BoundResult lemma2_mise_bound(const DensityModel& d, const KernelModel& k, double h, std::size_t n)
{
    check_positive(h, "bandwidth");
    check_n(n);
    Builder b("lemma2", RiskKind::mise, false, n);
    b.result().h0 = h;
    b.result().h_used = h;
    if (!b.require("kernel is a density", k.is_density))
        return b.inapplicable();
    auto bias = bias_sq_integral(d, k, h);
    return b.finish(bias.value / (2.0 * pi) + k.roughness / (dn(n) * h));
}

BoundResult conventional_mise_bound(const DensityModel& d, const KernelModel& k, int m, double h0, std::size_t n)
{
    check_positive(h0, "h0");
    check_n(n);
    if (m != 1 && m != 2)
        throw ConfigError("conventional MISE bound needs m in {1, 2}");
    Builder b(m == 2 ? "thm1" : "thm2", RiskKind::mise, false, n);
    const double rate = m == 2 ? 0.8 : 2.0 / 3.0;
    const double step = m == 2 ? 0.2 : 1.0 / 3.0;
    b.result().h0 = h0;
    b.result().h_used = h0 * std::pow(dn(n), -step);
    b.result().rate_exponent = rate;
    b.require("kernel is a density", k.is_density);
    auto V = variation(d, m);
    b.require(vname(m), V.has_value(), false);
    if (m == 2) {
        b.require("kernel has zero mean", k.zero_mean);
        b.require("mu2(K) finite", k.mu2.has_value());
    } else {
        b.require("mu1(K) finite", k.mu1.has_value());
    }
    if (!b.ok())
        return b.inapplicable();

    const double R = k.roughness;
    const double scale = std::pow(dn(n), -rate);
    if (m == 2) {
        const double mu2 = *k.mu2;
        double c1 = 3.0 * mu2 * mu2 * std::pow(*V, 5.0 / 3.0) / (10.0 * pi);
        double value = (c1 * std::pow(h0, 4) + R / h0) * scale;
        Optimal opt;
        opt.h0_star = std::pow(5.0 * pi * R / (6.0 * mu2 * mu2), 0.2) * std::pow(*V, -1.0 / 3.0);
        opt.h_star = opt.h0_star * std::pow(dn(n), -step);
        opt.minimized = std::pow(3.0 * 625.0 / (512.0 * pi), 0.2) * std::pow(mu2 * mu2 * std::pow(R, 4), 0.2)
                        * std::cbrt(*V) * scale;
        return b.finish(value, opt);
    }
    const double mu1 = *k.mu1;
    double c1 = 4.0 * mu1 * mu1 * std::pow(*V, 1.5) / (3.0 * pi);
    double value = (c1 * h0 * h0 + R / h0) * scale;
    Optimal opt;
    opt.h0_star = std::cbrt(3.0 * pi * R / (8.0 * mu1 * mu1 * std::pow(*V, 1.5)));
    opt.h_star = opt.h0_star * std::pow(dn(n), -step);
    opt.minimized = std::cbrt(9.0 / pi) * std::pow(mu1, 2.0 / 3.0) * std::sqrt(*V) * std::pow(R, 2.0 / 3.0) * scale;
    return b.finish(value, opt);
}

BoundResult conventional_maxmse_bound(const DensityModel& d, const KernelModel& k, int m, double h0,
                                      std::size_t n)
{
    check_positive(h0, "h0");
    check_n(n);
    if (m != 2 && m != 3)
        throw ConfigError("conventional sup-MSE bound needs m in {2, 3}");
    Builder b(m == 3 ? "thm3" : "thm4", RiskKind::max_mse, false, n);
    const double rate = m == 3 ? 0.8 : 2.0 / 3.0;
    const double step = m == 3 ? 0.2 : 1.0 / 3.0;
    b.result().h0 = h0;
    b.result().h_used = h0 * std::pow(dn(n), -step);
    b.result().rate_exponent = rate;
    b.require("kernel is a density", k.is_density);
    auto V = variation(d, m);
    b.require(vname(m), V.has_value(), false);
    b.require("p bounded (a supplied)", d.sup_bound.has_value(), false);
    b.require("A(K) finite", std::isfinite(k.a_value));
    if (m == 3) {
        b.require("kernel has zero mean", k.zero_mean);
        b.require("mu2(K) finite", k.mu2.has_value());
    } else {
        b.require("mu1(K) finite", k.mu1.has_value());
    }
    if (!b.ok())
        return b.inapplicable();

    const double aA = *d.sup_bound * k.a_value;
    const double scale = std::pow(dn(n), -rate);
    if (m == 3) {
        const double mu2 = *k.mu2;
        double c1 = 4.0 * mu2 * mu2 * std::pow(*V, 1.5) / (9.0 * pi * pi);
        double value = (c1 * std::pow(h0, 4) + 2.0 * aA / h0) * scale;
        Optimal opt;
        opt.h0_star = std::pow(9.0 * pi * pi * aA / (8.0 * mu2 * mu2), 0.2) * std::pow(*V, -0.3);
        opt.h_star = opt.h0_star * std::pow(dn(n), -step);
        opt.minimized = 5.0 * std::pow(36.0 * pi * pi, -0.2) * std::pow(mu2, 0.4) * std::pow(*V, 0.3)
                        * std::pow(aA, 0.8) * scale;
        return b.finish(value, opt);
    }
    const double mu1 = *k.mu1;
    double c1 = 9.0 * mu1 * mu1 * std::pow(*V, 4.0 / 3.0) / (4.0 * pi * pi);
    double c2 = 2.0 * aA;
    double value = (c1 * h0 * h0 + c2 / h0) * scale;
    Optimal opt;
    opt.h0_star = std::cbrt(c2 / (2.0 * c1));
    opt.h_star = opt.h0_star * std::pow(dn(n), -step);
    opt.minimized = 3.0 * std::cbrt(9.0 / (4.0 * pi * pi)) * std::pow(mu1, 2.0 / 3.0) * std::pow(*V, 4.0 / 9.0)
                    * std::pow(aA, 2.0 / 3.0) * scale;
    return b.finish(value, opt);
}

BoundResult nonsmooth_mise_bound(const DensityModel& d, const KernelModel& k, double h0, std::size_t n,
                                 bool unimodal)
{
    check_positive(h0, "h0");
    check_n(n);
    Builder b(unimodal ? "thm5_unimodal" : "thm5", RiskKind::mise, false, n);
    const double logn = std::log(dn(n));
    b.result().h0 = h0;
    b.result().h_used = h0 / (std::sqrt(dn(n)) * logn);
    b.require("n >= 16", n >= 16);
    b.require("kernel is a density", k.is_density);
    b.require("mu1(K) finite", k.mu1.has_value());
    std::optional<double> V;
    if (unimodal) {
        b.require("p unimodal", d.unimodal, false);
        b.require("p bounded (a supplied)", d.sup_bound.has_value(), false);
        if (d.sup_bound)
            V = 2.0 * *d.sup_bound;
    } else {
        V = variation(d, 0);
        b.require(vname(0), V.has_value(), false);
    }
    if (!b.ok())
        return b.inapplicable();

    const double mu1 = *k.mu1;
    double c = 4.0 * std::sqrt(2.0) / pi * std::max(std::sqrt(mu1), mu1)
               * std::max(std::pow(*V, 1.5), *V * *V) * std::max(std::sqrt(h0), h0);
    double value = logn * logn / std::sqrt(dn(n)) * (c + k.roughness / (h0 * logn));
    return b.finish(value);
}

BoundResult sinc_mise_bound(const DensityModel& d, SincSpec spec, double h, std::size_t n)
{
    check_positive(h, "bandwidth constant");
    check_n(n);
    const double N = dn(n);
    switch (spec.regime) {
    case SincRegime::nonsmooth:
    case SincRegime::nonsmooth_unimodal: {
        const bool uni = spec.regime == SincRegime::nonsmooth_unimodal;
        Builder b(uni ? "thm6_unimodal" : "thm6", RiskKind::mise, true, n);
        b.result().h0 = h;
        b.result().h_used = h / std::sqrt(N);
        b.result().rate_exponent = 0.5;
        std::optional<double> V;
        if (uni) {
            b.require("p unimodal", d.unimodal, false);
            b.require("p bounded (a supplied)", d.sup_bound.has_value(), false);
            if (d.sup_bound)
                V = 2.0 * *d.sup_bound;
        } else {
            V = variation(d, 0);
            b.require(vname(0), V.has_value(), false);
        }
        if (!b.ok())
            return b.inapplicable();
        Optimal opt;
        opt.h0_star = 1.0 / *V;
        opt.h_star = opt.h0_star / std::sqrt(N);
        opt.minimized = 2.0 * *V / (pi * std::sqrt(N));
        return b.finish((*V * *V * h + 1.0 / h) / (pi * std::sqrt(N)), opt);
    }
    case SincRegime::smooth: {
        const int m = spec.m;
        if (m < 1)
            throw ConfigError("smooth sinc regime needs m >= 1");
        Builder b("thm7", RiskKind::mise, true, n);
        const double rate = 2.0 * m / (2.0 * m + 1.0);
        b.result().h0 = h;
        b.result().h_used = h * std::pow(N, -1.0 / (2.0 * m + 1.0));
        b.result().rate_exponent = rate;
        auto V = variation(d, m);
        if (!b.require(vname(m), V.has_value(), false))
            return b.inapplicable();
        const double mm = m;
        double c = 4.0 * (mm + 1.0) / (2.0 * mm + 1.0) * std::pow(*V, (2.0 * mm + 1.0) / (mm + 1.0));
        double value = (c * std::pow(h, 2 * m) + 2.0 / h) * std::pow(N, -rate) / (2.0 * pi);
        Optimal opt;
        opt.h0_star = std::pow(1.0 / (mm * c), 1.0 / (2.0 * mm + 1.0));
        opt.h_star = opt.h0_star * std::pow(N, -1.0 / (2.0 * mm + 1.0));
        opt.minimized = std::pow(4.0 * (mm + 1.0), 1.0 / (2.0 * mm + 1.0))
                        * std::pow((2.0 * mm + 1.0) / mm, rate) * std::pow(*V, 1.0 / (mm + 1.0))
                        * std::pow(N, -rate) / (2.0 * pi);
        return b.finish(value, opt);
    }
    case SincRegime::supersmooth: {
        Builder b("thm9", RiskKind::mise, true, n);
        b.result().h0 = h;
        b.require("supersmooth constants supplied", d.supersmooth.has_value(), false);
        b.require("h0 n > 1", h * N > 1.0);
        if (!b.ok())
            return b.inapplicable();
        const auto& s = *d.supersmooth;
        const double L = std::log(h) + std::log(N);
        b.result().h_used = std::pow(L / s.gamma, -1.0 / s.alpha);
        double value = (2.0 * std::pow(s.gamma, -1.0 / s.alpha) * std::pow(L, 1.0 / s.alpha) + s.B / h)
                       / (2.0 * pi * N);
        return b.finish(value);
    }
    case SincRegime::bandlimited: {
        Builder b("thm11", RiskKind::mise, true, n);
        b.result().h0 = h;
        b.result().h_used = h;
        b.result().rate_exponent = 1.0;
        if (!b.require("cf vanishes beyond tau", d.cf_cutoff.has_value(), false))
            return b.inapplicable();
        if (!b.require("h <= 1/tau", h <= 1.0 / *d.cf_cutoff))
            return b.inapplicable();
        return b.finish(1.0 / (pi * N * h));
    }
    case SincRegime::generic: {
        Builder b("lemma5", RiskKind::mise, true, n);
        b.result().h0 = h;
        b.result().h_used = h;
        auto tail = sinc_tail_sq_integral(d, h);
        return b.finish((tail.value + 2.0 / (N * h)) / (2.0 * pi));
    }
    }
    throw ConfigError("unknown sinc regime");
}

BoundResult sinc_maxmse_bound(const DensityModel& d, SincSpec spec, double h, std::size_t n)
{
    check_positive(h, "bandwidth constant");
    check_n(n);
    const double N = dn(n);
    switch (spec.regime) {
    case SincRegime::smooth: {
        const int m = spec.m;
        Builder b("thm8", RiskKind::max_mse, true, n);
        if (!b.require("m >= 2", m >= 2))
            return b.inapplicable();
        const double mm = m;
        const double rate = 2.0 * (mm - 1.0) / (2.0 * mm - 1.0);
        b.result().h0 = h;
        b.result().h_used = h * std::pow(N, -1.0 / (2.0 * mm - 1.0));
        b.result().rate_exponent = rate;
        auto V = variation(d, m);
        if (!b.require(vname(m), V.has_value(), false))
            return b.inapplicable();
        double c1 = std::pow((mm + 1.0) / mm, 2) * std::pow(*V, 2.0 * mm / (mm + 1.0));
        double c2 = 2.0 * (std::pow(*V, 1.0 / (mm + 1.0)) + std::pow(*V, mm / (mm + 1.0)) / mm);
        double value = (c1 * std::pow(h, 2.0 * (mm - 1.0)) + c2 / h) * std::pow(N, -rate) / (pi * pi);
        Optimal opt;
        opt.h0_star = std::pow(c2 / (2.0 * (mm - 1.0) * c1), 1.0 / (2.0 * mm - 1.0));
        opt.h_star = opt.h0_star * std::pow(N, -1.0 / (2.0 * mm - 1.0));
        opt.minimized = (2.0 * mm - 1.0) / (pi * pi) * std::pow((mm + 1.0) / mm, 2.0 / (2.0 * mm - 1.0))
                        * std::pow((mm + std::pow(*V, (mm - 1.0) / (mm + 1.0))) / (mm * (mm - 1.0)), rate)
                        * std::pow(*V, 2.0 / (mm + 1.0)) * std::pow(N, -rate);
        return b.finish(value, opt);
    }
    case SincRegime::supersmooth: {
        Builder b("thm10", RiskKind::max_mse, true, n);
        b.result().h0 = h;
        b.require("supersmooth constants supplied", d.supersmooth.has_value(), false);
        b.require("A(p) supplied", d.a_p.has_value(), false);
        b.require("h0 n > 1", h * N > 1.0);
        if (!b.ok())
            return b.inapplicable();
        const auto& s = *d.supersmooth;
        const double L = std::log(h) + std::log(N);
        b.result().h_used = std::pow(L / s.gamma, -1.0 / s.alpha);
        double value = (2.0 * *d.a_p / pi * std::pow(s.gamma, -1.0 / s.alpha) * std::pow(L, 1.0 / s.alpha)
                        + s.B * s.B / (4.0 * pi * pi * N * h * h))
                       / N;
        return b.finish(value);
    }
    case SincRegime::bandlimited: {
        Builder b("thm11", RiskKind::max_mse, true, n);
        b.result().h0 = h;
        b.result().h_used = h;
        b.result().rate_exponent = 1.0;
        if (!b.require("cf vanishes beyond tau", d.cf_cutoff.has_value(), false))
            return b.inapplicable();
        if (!b.require("h <= 1/tau", h <= 1.0 / *d.cf_cutoff))
            return b.inapplicable();
        return b.finish(2.0 * *d.cf_cutoff / (pi * pi * N * h));
    }
    case SincRegime::generic: {
        Builder b("lemma5", RiskKind::max_mse, true, n);
        b.result().h0 = h;
        b.result().h_used = h;
        if (!b.require("A(p) supplied", d.a_p.has_value(), false))
            return b.inapplicable();
        auto tail = sinc_tail_abs_integral(d, h);
        if (!b.require("|f| integrable", std::isfinite(tail.value)))
            return b.inapplicable();
        double first = tail.value / (2.0 * pi);
        return b.finish(first * first + 2.0 * *d.a_p / (pi * N * h));
    }
    case SincRegime::nonsmooth:
    case SincRegime::nonsmooth_unimodal: {
        Builder b("sinc_maxmse_" + to_string(spec.regime), RiskKind::max_mse, true, n);
        b.require("regime has a sup-MSE bound", false);
        return b.inapplicable();
    }
    }
    throw ConfigError("unknown sinc regime");
}

AmiseResult amise_conventional(const DensityModel& d, const KernelModel& k, std::size_t n)
{
    check_n(n);
    if (!d.derivative)
        throw ConfigError("density '" + d.name + "' has no second derivative available");
    if (!k.mu2 || !k.is_density)
        throw ConfigError("kernel '" + k.name + "' has no finite second moment");
    auto g = [&](double x) {
        double v = d.derivative(x, 2);
        return v * v;
    };
    const auto [lo, hi] = d.support;
    double rpp = quad::integrate_panels(g, lo, hi, 64).value;
    const double mu2 = *k.mu2;
    const double R = k.roughness;
    AmiseResult out;
    out.roughness_p2 = rpp;
    out.h = std::pow(R / (mu2 * mu2), 0.2) * std::pow(rpp, -0.2) * std::pow(dn(n), -0.2);
    out.value = 1.25 * std::pow(mu2 * mu2 * std::pow(R, 4), 0.2) * std::pow(rpp, 0.2) * std::pow(dn(n), -0.8);
    return out;
}

double exact_counterpart(const BoundResult& r, const DensityModel& d, const KernelModel& k,
                         std::span<const double> xs)
{
    const KernelModel& kern = r.sinc ? sinc_kernel() : k;
    if (r.kind == RiskKind::mise)
        return r.sinc ? sinc_exact_mise(d, r.h_used, r.n).mise : exact_mise(d, kern, r.h_used, r.n).mise;
    return max_exact_mse(d, kern, r.h_used, r.n, xs);
}

std::vector<BoundResult> bound_table(const DensityModel& d, const KernelModel& k, std::size_t n)
{
    check_n(n);
    std::vector<BoundResult> rows;
    const double h = std::pow(dn(n), -0.2);
    auto at_optimum = [](auto&& fn) {
        BoundResult r = fn(1.0);
        if (r.optimal)
            r = fn(r.optimal->h0_star);
        return r;
    };
    if (k.is_density) {
        rows.push_back(lemma1_mse_bound(d, k, h, n));
        rows.push_back(lemma2_mise_bound(d, k, h, n));
        rows.push_back(at_optimum([&](double h0) { return conventional_mise_bound(d, k, 2, h0, n); }));
        rows.push_back(at_optimum([&](double h0) { return conventional_mise_bound(d, k, 1, h0, n); }));
        rows.push_back(at_optimum([&](double h0) { return conventional_maxmse_bound(d, k, 3, h0, n); }));
        rows.push_back(at_optimum([&](double h0) { return conventional_maxmse_bound(d, k, 2, h0, n); }));
        rows.push_back(nonsmooth_mise_bound(d, k, 1.0, n));
    }
    rows.push_back(at_optimum([&](double h0) { return sinc_mise_bound(d, {SincRegime::nonsmooth}, h0, n); }));
    auto smooth_order = [&](int lowest) {
        if (d.variation.count(2) && lowest <= 2)
            return 2;
        int best = 0;
        for (const auto& [m, v] : d.variation)
            if (m >= lowest)
                best = std::max(best, m);
        return best;
    };
    int m7 = smooth_order(1);
    rows.push_back(at_optimum([&](double h0) { return sinc_mise_bound(d, {SincRegime::smooth, std::max(m7, 1)}, h0, n); }));
    int m8 = smooth_order(2);
    rows.push_back(at_optimum([&](double h0) { return sinc_maxmse_bound(d, {SincRegime::smooth, std::max(m8, 2)}, h0, n); }));
    rows.push_back(sinc_mise_bound(d, {SincRegime::supersmooth}, 1.0, n));
    rows.push_back(sinc_maxmse_bound(d, {SincRegime::supersmooth}, 1.0, n));
    const double hb = d.cf_cutoff ? 1.0 / *d.cf_cutoff : h;
    rows.push_back(sinc_mise_bound(d, {SincRegime::bandlimited}, hb, n));
    rows.push_back(sinc_maxmse_bound(d, {SincRegime::bandlimited}, hb, n));
    return rows;
}

} // namespace kdecf
