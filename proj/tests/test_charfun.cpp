#include "kdecf/charfun.hpp"
#include "kdecf/errors.hpp"
#include "kdecf/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace kdecf;

namespace {

constexpr double pi = std::numbers::pi;

double std_normal_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
}

// Hermite-based derivative of the standard normal density, independent of the library.
double normal_derivative(double x, int k)
{
    double h0 = 1.0;
    double h1 = x;
    if (k == 0)
        return std_normal_pdf(x);
    for (int j = 1; j < k; ++j) {
        double h2 = x * h1 - j * h0;
        h0 = h1;
        h1 = h2;
    }
    return (k % 2 == 0 ? 1.0 : -1.0) * h1 * std_normal_pdf(x);
}

double variation_by_quadrature(int m)
{
    auto g = [m](double x) { return normal_derivative(x, m + 1); };
    return quad::integrate_abs(g, -15.0, 15.0, 3000).value;
}

} // namespace

TEST(Ecf, Examples)
{
    Sample origin({0.0});
    auto v = ecf(origin, 3.7);
    EXPECT_DOUBLE_EQ(v.real(), 1.0);
    EXPECT_DOUBLE_EQ(v.imag(), 0.0);
    Sample s({0.3, -1.2, 2.5});
    EXPECT_NEAR(std::abs(ecf(s, 0.0) - std::complex<double>(1.0, 0.0)), 0.0, 1e-15);
    Sample pm({-1.0, 1.0});
    for (double t : {0.1, 1.0, 2.7})
        EXPECT_NEAR(ecf(pm, t).real(), std::cos(t), 1e-15);
}

TEST(Ecf, TranslationCovariance)
{
    Rng rng(11);
    auto d = make_normal();
    Sample s = draw_sample(d, 40, rng);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 20; ++i) {
        double c = u(rng);
        double t = u(rng);
        auto lhs = ecf(s.shifted(c), t);
        auto rhs = std::exp(std::complex<double>(0.0, t * c)) * ecf(s, t);
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-13);
    }
}

TEST(EcfSq, Examples)
{
    Sample two({0.4, 1.9});
    EXPECT_NEAR(ecf_sq_unbiased(two, 1.3), std::cos(1.3 * 1.5), 1e-14);
    Sample s({0.0, 0.5, 1.0, 2.0});
    EXPECT_NEAR(ecf_sq_unbiased(s, 0.0), 1.0, 1e-14);
    double brute = 0.0;
    auto xs = s.values();
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 4; ++k)
            if (j != k)
                brute += std::cos(xs[j] - xs[k]);
    EXPECT_NEAR(ecf_sq_unbiased(s, 1.0), brute / 12.0, 1e-14);
    EXPECT_THROW(ecf_sq_unbiased(Sample({1.0}), 1.0), DomainError);
}

TEST(EcfSq, UnbiasedBySimulation)
{
    auto d = make_normal();
    Rng rng(2024);
    const int reps = 500;
    double sum = 0.0;
    double sumsq = 0.0;
    for (int r = 0; r < reps; ++r) {
        double v = ecf_sq_unbiased(draw_sample(d, 20, rng), 1.0);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / reps;
    double se = std::sqrt((sumsq / reps - mean * mean) / (reps - 1));
    EXPECT_LE(std::abs(mean - std::exp(-1.0)), 3.0 * se);
}

TEST(Sample, SortedAndValidated)
{
    Sample s({3.0, -1.0, 2.0});
    EXPECT_DOUBLE_EQ(s.min(), -1.0);
    EXPECT_DOUBLE_EQ(s.max(), 3.0);
    EXPECT_TRUE(std::is_sorted(s.values().begin(), s.values().end()));
    EXPECT_NEAR(s.sd(), 2.0816659994661326, 1e-14);
    EXPECT_THROW(Sample(std::vector<double>{}), DomainError);
    EXPECT_THROW(Sample({1.0, std::nan("")}), DomainError);
}

TEST(DensityModels, NormalVariationConstants)
{
    auto d = make_normal();
    EXPECT_NEAR(d.variation.at(2), 1.5100, 5e-4);
    EXPECT_NEAR(d.variation.at(3), 2.8006, 5e-4);
    for (int m = 0; m <= 4; ++m) {
        double q = variation_by_quadrature(m);
        EXPECT_GE(d.variation.at(m), q) << "stored constant must not undercut the quadrature, m=" << m;
        EXPECT_NEAR(d.variation.at(m), q, 1e-5 * q) << m;
    }
    EXPECT_NEAR(d.variation.at(0), 2.0 * std_normal_pdf(0.0), 1e-5);
}

TEST(DensityModels, NormalScaling)
{
    auto d1 = make_normal(0.0, 1.0);
    auto d2 = make_normal(1.0, 2.0);
    EXPECT_NEAR(d2.variation.at(2), d1.variation.at(2) / 8.0, 1e-5);
    EXPECT_NEAR(*d2.sup_bound, 1.0 / (2.0 * std::sqrt(2.0 * pi)), 1e-12);
}

TEST(DensityModels, CfInvariants)
{
    std::vector<DensityModel> models = {make_normal(0.5, 1.5), make_bimodal(), make_laplace(), make_uniform(),
                                        make_fejer(1.0),
                                        make_normal_mixture({0.3, 0.7}, {-1.0, 2.0}, {0.5, 1.0})};
    for (const auto& d : models) {
        EXPECT_NEAR(std::abs(d.cf(0.0) - std::complex<double>(1.0, 0.0)), 0.0, 1e-14) << d.name;
        for (double t : {0.3, 1.0, 2.5, 7.0}) {
            EXPECT_LE(std::abs(d.cf(t)), 1.0 + 1e-15) << d.name;
            EXPECT_NEAR(std::abs(d.cf(-t) - std::conj(d.cf(t))), 0.0, 1e-14) << d.name;
        }
        if (d.cf_cutoff)
            for (double t : {1.0001, 1.5, 3.0, 100.0})
                EXPECT_LT(std::abs(d.cf(t * *d.cf_cutoff)), 1e-12);
    }
}

TEST(DensityModels, InversionReproducesPdf)
{
    std::vector<DensityModel> models = {make_normal(0.5, 1.5), make_bimodal(), make_fejer(1.0),
                                        make_normal_mixture({0.3, 0.7}, {-1.0, 2.0}, {0.5, 1.0})};
    for (const auto& d : models) {
        double T = d.cf_cutoff ? *d.cf_cutoff : 40.0;
        for (double x : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
            auto g = [&](double t) {
                auto f = d.cf(t);
                return f.real() * std::cos(t * x) + f.imag() * std::sin(t * x);
            };
            double inv = quad::integrate_panels(g, 0.0, T, 64).value / pi;
            EXPECT_NEAR(inv, d.pdf(x), 1e-10) << d.name << " x=" << x;
        }
    }
}

TEST(DensityModels, MakeDensityByName)
{
    auto d = make_density("normal", {{"mu", {1.0}}, {"sigma", {2.0}}});
    EXPECT_NEAR(d.pdf(1.0), 1.0 / (2.0 * std::sqrt(2.0 * pi)), 1e-14);
    EXPECT_THROW(make_density("cauchy"), ConfigError);
    EXPECT_THROW(make_density("normal", {{"sigma", {-1.0}}}), ConfigError);
}

TEST(DensityModels, SamplersMatchMoments)
{
    Rng rng(99);
    for (const auto& d : {make_normal(1.0, 2.0), make_uniform(0.0, 1.0), make_bimodal(), make_fejer(1.0)}) {
        Sample s = draw_sample(d, 20000, rng);
        // compare the empirical cf with the true cf at a few frequencies
        for (double t : {0.3, 0.8}) {
            EXPECT_NEAR(std::abs(ecf(s, t) - d.cf(t)), 0.0, 0.03) << d.name << " t=" << t;
        }
    }
}

TEST(Envelope, Examples)
{
    auto d = make_normal();
    EXPECT_NEAR(cf_envelope(d, 3, 2.0), d.variation.at(2) / 8.0, 1e-15);
    EXPECT_NEAR(cf_envelope(d, 3, 2.0), 0.18875, 1e-4);
    EXPECT_LE(std::abs(d.cf(2.0)), cf_envelope(d, 3, 2.0));
    EXPECT_DOUBLE_EQ(cf_envelope(d, 2, 0.0), 1.0);
    EXPECT_NEAR(cf_envelope(d, 1, 10.0), 0.079788, 1e-5);
    DensityModel bare;
    EXPECT_THROW(cf_envelope(bare, 2, 1.0), ConfigError);
}

TEST(Envelope, DominatesNormalCf)
{
    auto d = make_normal();
    for (int m = 1; m <= 4; ++m)
        for (int i = 0; i < 200; ++i) {
            double t = 0.01 * std::pow(10000.0, i / 199.0);
            EXPECT_GE(cf_envelope(d, m, t), std::abs(d.cf(t))) << "m=" << m << " t=" << t;
        }
}

TEST(OneMinusCf, Examples)
{
    auto g = make_builtin("gaussian");
    EXPECT_NEAR(one_minus_cf_bound(g, 1.0), 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(one_minus_cf_bound(g, 0.0), 0.0);
    EXPECT_NEAR(one_minus_cf_bound(g, 1.0, 0.5), std::sqrt(std::sqrt(2.0 / pi)) * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(one_minus_cf_bound(g, 1.0, 0.5), 1.26330, 1e-4);
    EXPECT_THROW(one_minus_cf_bound(make_builtin("sinc"), 1.0), UnsupportedKernelError);
    EXPECT_THROW(one_minus_cf_bound(g, 1.0, 1.5), DomainError);
}

TEST(OneMinusCf, Dominance)
{
    for (const char* name : {"gaussian", "epanechnikov", "uniform"}) {
        auto k = make_builtin(name);
        for (int i = 0; i < 200; ++i) {
            double t = 0.01 * std::pow(10000.0, i / 199.0);
            double actual = std::abs(1.0 - k.cf(t));
            EXPECT_GE(one_minus_cf_bound(k, t) + 1e-15, actual) << name << " t=" << t;
            for (double alpha : {0.26, 0.4, 0.49})
                EXPECT_GE(one_minus_cf_bound(k, t, alpha) + 1e-15, actual) << name << " t=" << t;
        }
    }
}

TEST(TailBounds, DominateNumericTails)
{
    for (const auto& d : {make_normal(), make_bimodal(), make_fejer(1.0), make_uniform()}) {
        for (double T : {1.0, 3.0, 10.0}) {
            double abs_tail = cf_abs_tail_bound(d, T);
            double sq_tail = cf_sq_tail_bound(d, T);
            double num_sq = quad::integrate_panels([&](double t) { return std::norm(d.cf(t)); }, T, T + 2000.0,
                                                   4000)
                                .value;
            EXPECT_GE(sq_tail, num_sq) << d.name << " T=" << T;
            if (std::isfinite(abs_tail)) {
                double num_abs =
                    quad::integrate_panels([&](double t) { return std::abs(d.cf(t)); }, T, T + 2000.0, 4000).value;
                EXPECT_GE(abs_tail, num_abs) << d.name << " T=" << T;
            }
        }
    }
}
