#include "kdecf/charfun.hpp"

#include "kdecf/errors.hpp"
#include "kdecf/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

namespace kdecf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inv_sqrt_2pi = 0.3989422804014327;
constexpr int kMaxOrder = 5; // variation constants V_0..V_5 for smooth built-ins

using cplx = std::complex<double>;

// Variation constants are kept to six significant digits, rounded upwards so
// that the stored value still majorizes the true one.
double round_up_6(double v)
{
    if (!(v > 0.0) || !std::isfinite(v))
        return v;
    double e = std::floor(std::log10(v));
    double scale = std::pow(10.0, 5.0 - e);
    return std::ceil(v * scale * (1.0 - 1e-15)) / scale;
}

// Probabilists' Hermite polynomial He_k(z).
double hermite(int k, double z)
{
    double h0 = 1.0, h1 = z;
    if (k == 0)
        return h0;
    for (int j = 1; j < k; ++j) {
        double h2 = z * h1 - j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// k-th derivative of the standard normal density.
double std_normal_derivative(double z, int k)
{
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * hermite(k, z) * inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

const std::array<double, kMaxOrder + 1>& unit_normal_variation()
{
    static const auto table = [] {
        std::array<double, kMaxOrder + 1> v{};
        for (int m = 0; m <= kMaxOrder; ++m) {
            auto r = quad::integrate_abs([m](double z) { return std_normal_derivative(z, m + 1); },
                                         -14.0, 14.0, 2800);
            v[m] = r.value;
        }
        return v;
    }();
    return table;
}

// Derivatives of the unit Fejer density (1 - cos x) / (pi x^2).
double fejer_unit_derivative(double x, int k)
{
    if (std::abs(x) <= 2.0) {
        using Rule = boost::math::quadrature::gauss<double, 30>;
        const double shift = k * pi / 2.0;
        return Rule::integrate([&](double t) { return (1.0 - t) * std::pow(t, k) * std::cos(t * x + shift); },
                               0.0, 1.0)
             / pi;
    }
    // Leibniz rule on (1 - cos x) * x^-2
    double sum = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
        double g = (j == 0) ? 1.0 - std::cos(x) : -std::cos(x + j * pi / 2.0);
        int r = k - j;
        double fact = std::tgamma(r + 2.0); // (r + 1)!
        double rd = ((r % 2 == 0) ? 1.0 : -1.0) * fact * std::pow(x, -2.0 - r);
        sum += binom * g * rd;
        binom = binom * (k - j) / (j + 1.0);
    }
    return sum / pi;
}

const std::array<double, kMaxOrder>& unit_fejer_variation()
{
    static const auto table = [] {
        std::array<double, kMaxOrder> v{};
        const double L = 1000.0 * pi;
        for (int m = 0; m < kMaxOrder; ++m) {
            int k = m + 1;
            auto r = quad::integrate_abs([k](double x) { return fejer_unit_derivative(x, k); }, 0.0, L, 40000);
            // |p^(k)(x)| ~ |cos(x + k pi / 2)| / (pi x^2) for large x
            double tail = (2.0 / (pi * pi)) / L * (1.0 + 2.0 * (k + 1) * (k + 1) / L);
            v[m] = 2.0 * (r.value + tail);
        }
        return v;
    }();
    return table;
}

// Upper bound of a density on [lo, hi] from a fine scan with local refinement.
double scan_sup(const std::function<double(double)>& p, double lo, double hi, bool* unimodal)
{
    const int cells = 20000;
    const double step = (hi - lo) / cells;
    std::vector<double> ys(cells + 1);
    for (int i = 0; i <= cells; ++i)
        ys[i] = p(lo + step * i);
    int best = static_cast<int>(std::max_element(ys.begin(), ys.end()) - ys.begin());
    int peaks = 0;
    for (int i = 1; i < cells; ++i)
        if (ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] && ys[i] > 1e-12)
            ++peaks;
    if (unimodal)
        *unimodal = peaks <= 1;
    // golden section on the bracketing cells
    double a = lo + step * std::max(0, best - 1);
    double b = lo + step * std::min(cells, best + 1);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int it = 0; it < 100; ++it) {
        if (p(c) > p(d))
            b = d;
        else
            a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    double peak = std::max(ys[best], p(0.5 * (a + b)));
    return peak * (1.0 + 1e-12);
}

} // namespace

DensityModel make_normal(double mu, double sigma)
{
    if (!(sigma > 0.0))
        throw DomainError("normal density needs sigma > 0");
    DensityModel d;
    d.name = "normal";
    d.cf = [mu, sigma](double t) {
        return std::exp(-0.5 * sigma * sigma * t * t) * cplx(std::cos(mu * t), std::sin(mu * t));
    };
    d.pdf = [mu, sigma](double x) {
        double z = (x - mu) / sigma;
        return inv_sqrt_2pi / sigma * std::exp(-0.5 * z * z);
    };
    d.derivative = [mu, sigma](double x, int k) {
        return std_normal_derivative((x - mu) / sigma, k) / std::pow(sigma, k + 1);
    };
    const auto& unit = unit_normal_variation();
    for (int m = 0; m <= kMaxOrder; ++m)
        d.variation[m] = round_up_6(unit[m] / std::pow(sigma, m + 1));
    d.sup_bound = inv_sqrt_2pi / sigma;
    // exp(gamma t^2) |f(t)| = exp(-sigma^2 t^2 / 4) for gamma = sigma^2 / 4
    d.supersmooth = Supersmooth{2.0, 0.25 * sigma * sigma, 2.0 * std::sqrt(pi) / sigma};
    d.a_p = inv_sqrt_2pi / sigma;
    d.roughness = 1.0 / (2.0 * sigma * std::sqrt(pi));
    d.unimodal = true;
    d.cf_frequency = std::abs(mu);
    d.support = {mu - 12.0 * sigma, mu + 12.0 * sigma};
    d.sampler = [mu, sigma](Rng& rng) {
        std::normal_distribution<double> dist(mu, sigma);
        return dist(rng);
    };
    return d;
}

DensityModel make_normal_mixture(std::vector<double> weights, std::vector<double> means,
                                 std::vector<double> sds)
{
    const std::size_t k = weights.size();
    if (k == 0 || means.size() != k || sds.size() != k)
        throw ConfigError("mixture needs equally sized, nonempty weights/means/sds");
    double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(sds[i] > 0.0) || weights[i] < 0.0)
            throw DomainError("mixture components need sd > 0 and weight >= 0");
        weights[i] /= wsum;
    }

    DensityModel d;
    d.name = "mixture";
    d.cf = [=](double t) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            s += weights[i] * std::exp(-0.5 * sds[i] * sds[i] * t * t)
               * cplx(std::cos(means[i] * t), std::sin(means[i] * t));
        return s;
    };
    d.derivative = [=](double x, int order) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            s += weights[i] * std_normal_derivative((x - means[i]) / sds[i], order)
               / std::pow(sds[i], order + 1);
        return s;
    };
    auto deriv = d.derivative;
    d.pdf = [deriv](double x) { return deriv(x, 0); };

    double lo = *std::min_element(means.begin(), means.end());
    double hi = *std::max_element(means.begin(), means.end());
    double smax = *std::max_element(sds.begin(), sds.end());
    double smin = *std::min_element(sds.begin(), sds.end());
    d.support = {lo - 12.0 * smax, hi + 12.0 * smax};

    for (int m = 0; m <= kMaxOrder; ++m) {
        auto r = quad::integrate_abs([deriv, m](double x) { return deriv(x, m + 1); },
                                     d.support.first, d.support.second, 8000);
        d.variation[m] = round_up_6(r.value);
    }
    bool unimodal = false;
    d.sup_bound = scan_sup(d.pdf, d.support.first, d.support.second, &unimodal);
    d.unimodal = unimodal;

    const double gamma = 0.25 * smin * smin;
    const double tmax = std::sqrt(4.0 * 40.0) / smin;
    auto cf = d.cf;
    const std::size_t panels = 64 + static_cast<std::size_t>(tmax * std::max(std::abs(lo), std::abs(hi)));
    double B = 2.0 * quad::integrate_panels(
                         [&](double t) { return std::exp(gamma * t * t) * std::abs(cf(t)); }, 0.0, tmax, panels)
                         .value;
    d.supersmooth = Supersmooth{2.0, gamma, B};
    d.a_p = quad::integrate_panels([&](double t) { return std::abs(cf(t)); }, 0.0, tmax, panels).value / pi;

    double rough = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double s2 = sds[i] * sds[i] + sds[j] * sds[j];
            double dm = means[i] - means[j];
            rough += weights[i] * weights[j] * std::exp(-0.5 * dm * dm / s2) / std::sqrt(2.0 * pi * s2);
        }
    d.roughness = rough;
    d.cf_frequency = std::max(std::abs(lo), std::abs(hi));
    d.sampler = [=](Rng& rng) {
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        std::size_t c = pick(rng);
        std::normal_distribution<double> dist(means[c], sds[c]);
        return dist(rng);
    };
    return d;
}

DensityModel make_bimodal()
{
    auto d = make_normal_mixture({0.5, 0.5}, {-1.0, 1.0}, {2.0 / 3.0, 2.0 / 3.0});
    d.name = "bimodal";
    return d;
}

DensityModel make_laplace(double mu, double b)
{
    if (!(b > 0.0))
        throw DomainError("laplace density needs b > 0");
    DensityModel d;
    d.name = "laplace";
    d.cf = [mu, b](double t) { return cplx(std::cos(mu * t), std::sin(mu * t)) / (1.0 + b * b * t * t); };
    d.pdf = [mu, b](double x) { return std::exp(-std::abs(x - mu) / b) / (2.0 * b); };
    d.variation[0] = 1.0 / b;
    d.sup_bound = 1.0 / (2.0 * b);
    d.a_p = 1.0 / (2.0 * b);
    d.roughness = 1.0 / (4.0 * b);
    d.unimodal = true;
    d.cf_frequency = std::abs(mu);
    d.support = {mu - 40.0 * b, mu + 40.0 * b};
    d.sampler = [mu, b](Rng& rng) {
        std::exponential_distribution<double> e(1.0 / b);
        std::bernoulli_distribution coin(0.5);
        double v = e(rng);
        return coin(rng) ? mu + v : mu - v;
    };
    return d;
}

DensityModel make_uniform(double lo, double hi)
{
    if (!(hi > lo))
        throw DomainError("uniform density needs hi > lo");
    const double w = hi - lo;
    const double c = 0.5 * (lo + hi);
    DensityModel d;
    d.name = "uniform";
    d.cf = [w, c](double t) {
        double u = 0.5 * w * t;
        double s = std::abs(u) < 1e-6 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
        return s * cplx(std::cos(c * t), std::sin(c * t));
    };
    d.pdf = [lo, hi, w](double x) { return (x >= lo && x <= hi) ? 1.0 / w : 0.0; };
    d.variation[0] = 2.0 / w;
    d.sup_bound = 1.0 / w;
    d.roughness = 1.0 / w;
    d.unimodal = true;
    d.cf_frequency = std::max(std::abs(lo), std::abs(hi));
    d.support = {lo - 0.5 * w, hi + 0.5 * w};
    d.sampler = [lo, hi](Rng& rng) {
        std::uniform_real_distribution<double> u(lo, hi);
        return u(rng);
    };
    return d;
}

DensityModel make_fejer(double tau)
{
    if (!(tau > 0.0))
        throw DomainError("fejer density needs tau > 0");
    DensityModel d;
    d.name = "fejer";
    d.cf = [tau](double t) { return cplx(std::max(0.0, 1.0 - std::abs(t) / tau), 0.0); };
    d.derivative = [tau](double x, int k) { return std::pow(tau, k + 1) * fejer_unit_derivative(tau * x, k); };
    d.pdf = [tau](double x) { return tau * fejer_unit_derivative(tau * x, 0); };
    const auto& unit = unit_fejer_variation();
    for (int m = 0; m < kMaxOrder; ++m)
        d.variation[m] = round_up_6(unit[m] * std::pow(tau, m + 1));
    d.sup_bound = tau / (2.0 * pi);
    d.supersmooth = Supersmooth{1.0, 1.0 / tau, 2.0 * tau * (std::numbers::e - 2.0)};
    d.cf_cutoff = tau;
    d.a_p = tau / (2.0 * pi);
    d.roughness = tau / (3.0 * pi);
    d.cf_frequency = 0.0;
    d.support = {-40.0 * pi / tau, 40.0 * pi / tau};
    d.sampler = [tau](Rng& rng) {
        // rejection from a Cauchy(0, 2) envelope: p(x) <= 2 * cauchy(x)
        std::cauchy_distribution<double> prop(0.0, 2.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (;;) {
            double x = prop(rng);
            double p = fejer_unit_derivative(x, 0);
            double q = 2.0 / (pi * (4.0 + x * x));
            if (u(rng) * 2.0 * q <= p)
                return x / tau;
        }
    };
    return d;
}

DensityModel make_density(const std::string& name, const std::map<std::string, std::vector<double>>& params)
{
    auto get = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        if (it == params.end())
            return fallback;
        if (it->second.size() != 1)
            throw ConfigError("parameter '" + key + "' of density '" + name + "' must be a scalar");
        return it->second.front();
    };
    auto get_vec = [&](const std::string& key) {
        auto it = params.find(key);
        if (it == params.end())
            throw ConfigError("density '" + name + "' needs parameter '" + key + "'");
        return it->second;
    };
    for (const auto& [key, value] : params) {
        static const std::map<std::string, std::vector<std::string>> allowed{
            {"normal", {"mu", "sigma"}},   {"mixture", {"weights", "means", "sds"}},
            {"bimodal", {}},               {"laplace", {"mu", "b"}},
            {"uniform", {"lo", "hi"}},     {"fejer", {"tau"}}};
        auto it = allowed.find(name);
        if (it != allowed.end() && std::find(it->second.begin(), it->second.end(), key) == it->second.end())
            throw ConfigError("density '" + name + "' has no parameter '" + key + "'");
    }
    try {
        if (name == "normal")
            return make_normal(get("mu", 0.0), get("sigma", 1.0));
        if (name == "mixture")
            return make_normal_mixture(get_vec("weights"), get_vec("means"), get_vec("sds"));
        if (name == "bimodal")
            return make_bimodal();
        if (name == "laplace")
            return make_laplace(get("mu", 0.0), get("b", 1.0));
        if (name == "uniform")
            return make_uniform(get("lo", 0.0), get("hi", 1.0));
        if (name == "fejer")
            return make_fejer(get("tau", 1.0));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown density '" + name
                      + "' (expected normal, mixture, bimodal, laplace, uniform or fejer)");
}

Sample::Sample(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty())
        throw DomainError("sample must contain at least one observation");
    for (double v : values_)
        if (!std::isfinite(v))
            throw DomainError("sample contains a non-finite value");
    std::sort(values_.begin(), values_.end());
}

double Sample::mean() const
{
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double Sample::sd() const
{
    if (values_.size() < 2)
        return 0.0;
    double m = mean();
    double ss = 0.0;
    for (double v : values_)
        ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values_.size() - 1));
}

Sample Sample::shifted(double c) const
{
    std::vector<double> v(values_.begin(), values_.end());
    for (double& x : v)
        x += c;
    return Sample(std::move(v));
}

Sample draw_sample(const DensityModel& d, std::size_t n, Rng& rng)
{
    if (!d.sampler)
        throw ConfigError("density '" + d.name + "' has no sampler");
    std::vector<double> v(n);
    for (double& x : v)
        x = d.sampler(rng);
    return Sample(std::move(v));
}

std::complex<double> ecf(const Sample& s, double t)
{
    double re = 0.0, im = 0.0;
    for (double x : s.values()) {
        re += std::cos(t * x);
        im += std::sin(t * x);
    }
    double n = static_cast<double>(s.size());
    return {re / n, im / n};
}

double ecf_sq_unbiased(const Sample& s, double t)
{
    const std::size_t n = s.size();
    if (n < 2)
        throw DomainError("unbiased |f|^2 estimate needs n >= 2");
    // sum_{j != k} cos(t (X_j - X_k)) = |sum_j exp(i t X_j)|^2 - n
    double re = 0.0, im = 0.0;
    for (double x : s.values()) {
        re += std::cos(t * x);
        im += std::sin(t * x);
    }
    double nn = static_cast<double>(n);
    return (re * re + im * im - nn) / (nn * (nn - 1.0));
}

double cf_envelope(const DensityModel& d, int m, double t)
{
    if (m < 1)
        throw DomainError("envelope order must be positive");
    auto it = d.variation.find(m - 1);
    if (it == d.variation.end())
        throw ConfigError("density '" + d.name + "' has no variation constant V_" + std::to_string(m - 1));
    double at = std::abs(t);
    if (at == 0.0)
        return 1.0;
    return std::min(1.0, it->second / std::pow(at, m));
}

double one_minus_cf_bound(const KernelModel& k, double t, std::optional<double> alpha)
{
    if (k.is_sinc || !k.is_density)
        throw UnsupportedKernelError("kernel '" + k.name + "' is not a probability density");
    double at = std::abs(t);
    if (alpha) {
        if (!(*alpha > 0.0 && *alpha < 1.0))
            throw DomainError("alpha must lie in (0, 1)");
        if (!k.mu1)
            throw ConfigError("kernel '" + k.name + "' has no first absolute moment");
        return std::pow(*k.mu1, *alpha) * std::pow(2.0, 1.0 - *alpha) * std::pow(at, *alpha);
    }
    double best = 2.0;
    if (k.mu1)
        best = std::min(best, *k.mu1 * at);
    if (k.mu2 && k.zero_mean)
        best = std::min(best, 0.5 * *k.mu2 * at * at);
    return best;
}

double cf_abs_tail_bound(const DensityModel& d, double T)
{
    if (d.cf_cutoff && T >= *d.cf_cutoff)
        return 0.0;
    double best = kInf;
    if (d.supersmooth && std::isfinite(d.supersmooth->B))
        best = std::min(best, std::exp(-d.supersmooth->gamma * std::pow(T, d.supersmooth->alpha))
                                  * 0.5 * d.supersmooth->B);
    if (T > 0.0)
        for (const auto& [order, v] : d.variation) {
            int m = order + 1;
            if (m >= 2)
                best = std::min(best, v / ((m - 1) * std::pow(T, m - 1)));
        }
    return best;
}

double cf_sq_tail_bound(const DensityModel& d, double T)
{
    if (d.cf_cutoff && T >= *d.cf_cutoff)
        return 0.0;
    double best = kInf;
    if (d.supersmooth && std::isfinite(d.supersmooth->B))
        best = std::min(best, std::exp(-d.supersmooth->gamma * std::pow(T, d.supersmooth->alpha))
                                  * 0.5 * d.supersmooth->B);
    if (T > 0.0)
        for (const auto& [order, v] : d.variation) {
            int m = order + 1;
            best = std::min(best, v * v / ((2 * m - 1) * std::pow(T, 2 * m - 1)));
        }
    return best;
}

double cf_sup_beyond(const DensityModel& d, double T)
{
    if (d.cf_cutoff && T > *d.cf_cutoff)
        return 0.0;
    double best = 1.0;
    if (T > 0.0)
        for (const auto& [order, v] : d.variation)
            best = std::min(best, v / std::pow(T, order + 1));
    return best;
}

} // namespace kdecf
