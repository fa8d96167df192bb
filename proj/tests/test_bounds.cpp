#include "kdecf/bounds.hpp"
#include "kdecf/errors.hpp"
#include "kdecf/quadrature.hpp"
#include "kdecf/risk.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace kdecf;

namespace {

constexpr double pi = std::numbers::pi;

const KernelModel& gauss()
{
    static const KernelModel k = make_builtin("gaussian");
    return k;
}

DensityModel constants(std::map<int, double> v, std::optional<double> a = {}, bool unimodal = false)
{
    DensityModel d;
    d.name = "constants";
    d.variation = std::move(v);
    d.sup_bound = a;
    d.unimodal = unimodal;
    return d;
}

// Checks the closed-form optimum of `fn` against direct minimization over h0.
void expect_corollary(const std::function<BoundResult(double)>& fn, double tol = 1e-9)
{
    BoundResult at1 = fn(1.0);
    ASSERT_TRUE(at1.optimal) << at1.theorem_id;
    double h = oracle::argmin([&](double h0) { return *fn(h0).bound; }, 1e-4, 1e3);
    EXPECT_TRUE(oracle::rel_close(at1.optimal->h0_star, h, tol))
        << at1.theorem_id << " closed " << at1.optimal->h0_star << " numeric " << h;
    EXPECT_TRUE(oracle::rel_close(at1.optimal->minimized, *fn(h).bound, tol))
        << at1.theorem_id << " closed " << at1.optimal->minimized << " numeric " << *fn(h).bound;
}

} // namespace

TEST(PointwiseMseBound, DominatesExactMse)
{
    auto d = make_normal();
    auto b = lemma1_mse_bound(d, gauss(), 0.3, 50);
    ASSERT_TRUE(b.applicable());
    for (double x : {0.0, 0.5, 2.0})
        EXPECT_GE(*b.bound, exact_mse(d, gauss(), 0.3, 50, x));
}

TEST(PointwiseMseBound, NonIntegrableKernelCfIsInapplicable)
{
    KernelModel stub = make_builtin("gaussian");
    stub.cf = [](double) { return 1.0; };
    stub.a_value = kInf;
    auto b = lemma1_mse_bound(make_normal(), stub, 0.3, 50);
    EXPECT_FALSE(b.applicable());
    EXPECT_FALSE(b.failed_assumptions().empty());
}

TEST(PointwiseMseBound, VarianceTermScalesAsOneOverNh)
{
    auto d = make_normal();
    auto second = [&](double h) {
        double first = abs_bias_integral(d, gauss(), h).value / (2.0 * pi);
        return *lemma1_mse_bound(d, gauss(), h, 40).bound - first * first;
    };
    EXPECT_NEAR(second(0.6), 0.5 * second(0.3), 1e-14);
    EXPECT_NEAR(second(0.3), 2.0 * *d.sup_bound * gauss().a_value / (40 * 0.3), 1e-14);
}

TEST(PointwiseMseBound, MissingSupBound)
{
    auto d = make_normal();
    d.sup_bound.reset();
    EXPECT_FALSE(lemma1_mse_bound(d, gauss(), 0.3, 50).applicable());
}

TEST(MiseBound, DominatesExactMise)
{
    auto d = make_normal();
    for (double h : {0.1, 0.3, 1.0})
        for (std::size_t n : {10u, 100u}) {
            auto b = lemma2_mise_bound(d, gauss(), h, n);
            ASSERT_TRUE(b.applicable());
            EXPECT_GE(*b.bound, exact_mise(d, gauss(), h, n).mise) << h << " " << n;
        }
}

TEST(MiseBound, ParsevalVarianceTerm)
{
    double h = 0.3;
    double n = 25;
    double integral = 2.0 * quad::integrate([](double t) { return std::exp(-t * t); }, 0.0, 40.0).value;
    EXPECT_NEAR(integral / (2.0 * pi * n * h), gauss().roughness / (n * h), 1e-14);
    auto d = make_normal();
    auto small = *lemma2_mise_bound(d, gauss(), h, 1000000000).bound;
    EXPECT_NEAR(small, bias_sq_integral(d, gauss(), h).value / (2.0 * pi), 1e-9);
}

TEST(SmoothMiseBound, NormalBandwidthConstant)
{
    auto b = conventional_mise_bound(make_normal(), gauss(), 2, 1.0, 1);
    ASSERT_TRUE(b.optimal);
    EXPECT_NEAR(b.optimal->h_star, 0.8204, 5e-4);
    auto b2 = conventional_mise_bound(make_normal(0.0, 2.0), gauss(), 2, 1.0, 1);
    EXPECT_NEAR(b2.optimal->h_star, 2.0 * b.optimal->h_star, 1e-5);
    EXPECT_NEAR(b.h_used, 1.0, 0.0);
    EXPECT_NEAR(conventional_mise_bound(make_normal(), gauss(), 2, 1.0, 32).h_used, 0.5, 1e-15);
}

TEST(SmoothMiseBound, CorollaryMatchesMinimization)
{
    for (const auto& d : {make_normal(), make_normal(0.0, 2.0), make_bimodal()})
        for (const char* kn : {"gaussian", "epanechnikov"}) {
            auto k = make_builtin(kn);
            expect_corollary([&](double h0) { return conventional_mise_bound(d, k, 2, h0, 200); });
        }
}

TEST(LipschitzMiseBound, CorollaryValue)
{
    auto d = constants({{1, 1.0}});
    auto b = conventional_mise_bound(d, gauss(), 1, 1.0, 1000);
    ASSERT_TRUE(b.optimal);
    double mu1 = *gauss().mu1;
    double R = gauss().roughness;
    double expected = std::cbrt(9.0 / pi) * std::pow(mu1, 2.0 / 3.0) * std::pow(R, 2.0 / 3.0) * std::pow(1000.0, -2.0 / 3.0);
    EXPECT_NEAR(b.optimal->minimized, expected, 1e-15);
    for (double v : {1.0, 0.3, 5.0})
        expect_corollary([&](double h0) { return conventional_mise_bound(constants({{1, v}}), gauss(), 1, h0, 1000); });
}

TEST(SmoothSupMseBound, NormalBandwidthConstant)
{
    auto b = conventional_maxmse_bound(make_normal(), gauss(), 3, 1.0, 1);
    ASSERT_TRUE(b.optimal);
    double aA = 1.0 / (2.0 * pi);
    double expected = std::pow(9.0 * pi * pi * aA / 8.0, 0.2) * std::pow(2.8006, -0.3);
    EXPECT_NEAR(b.optimal->h_star, expected, 5e-5);
    EXPECT_NEAR(b.optimal->h_star, 0.82277, 5e-5);
    // published constant drops the aA factor
    EXPECT_NEAR(std::pow(9.0 * pi * pi / 8.0, 0.2) * std::pow(2.8006, -0.3), 1.1883, 5e-4);
}

TEST(SmoothSupMseBound, CorollaryMatchesMinimization)
{
    for (const auto& d : {make_normal(), make_normal(1.0, 0.5), make_bimodal()})
        expect_corollary([&](double h0) { return conventional_maxmse_bound(d, gauss(), 3, h0, 100); });
    auto b = conventional_maxmse_bound(make_normal(), gauss(), 3, 1.0, 100);
    double closed = 5.0 * std::pow(36.0 * pi * pi, -0.2) * std::pow(make_normal().variation.at(3), 0.3)
                    * std::pow(1.0 / (2.0 * pi), 0.8) * std::pow(100.0, -0.8);
    EXPECT_NEAR(b.optimal->minimized, closed, 1e-15);
    EXPECT_NEAR(5.0 * std::pow(36.0 * pi * pi, -0.2), 1.544719, 1e-6);
}

TEST(LipschitzSupMseBound, ValueAtUnitConstants)
{
    auto d = constants({{2, 1.0}}, 1.0);
    auto b = conventional_maxmse_bound(d, gauss(), 2, 1.0, 100);
    ASSERT_TRUE(b.applicable());
    double mu1 = std::sqrt(2.0 / pi);
    double A = 1.0 / std::sqrt(2.0 * pi);
    double expected = (9.0 * mu1 * mu1 / (4.0 * pi * pi) + 2.0 * A) * std::pow(100.0, -2.0 / 3.0);
    EXPECT_NEAR(*b.bound, expected, 1e-15);
    for (double a : {1.0, 0.2, 3.0})
        expect_corollary([&](double h0) { return conventional_maxmse_bound(constants({{2, 1.3}}, a), gauss(), 2, h0, 100); });
}

TEST(Conventional, MissingConstantsInapplicable)
{
    auto d = make_uniform();
    for (int m : {1, 2})
        EXPECT_FALSE(conventional_mise_bound(d, gauss(), m, 1.0, 100).applicable());
    for (int m : {2, 3})
        EXPECT_FALSE(conventional_maxmse_bound(d, gauss(), m, 1.0, 100).applicable());
    EXPECT_FALSE(conventional_mise_bound(make_normal(), make_builtin("sinc"), 2, 1.0, 100).applicable());
    EXPECT_FALSE(conventional_maxmse_bound(make_normal(), make_builtin("uniform"), 3, 1.0, 100).applicable());
    EXPECT_THROW(conventional_mise_bound(make_normal(), gauss(), 3, 1.0, 100), ConfigError);
}

TEST(Conventional, AssumptionsRecorded)
{
    auto b = conventional_mise_bound(make_normal(), gauss(), 2, 1.0, 100);
    bool saw_user = false;
    bool saw_machine = false;
    for (const auto& a : b.assumptions) {
        EXPECT_TRUE(a.satisfied);
        saw_user = saw_user || !a.machine_checked;
        saw_machine = saw_machine || a.machine_checked;
    }
    EXPECT_TRUE(saw_user);
    EXPECT_TRUE(saw_machine);
}

TEST(BoundedVariationMiseBound, HypothesisGate)
{
    EXPECT_FALSE(nonsmooth_mise_bound(make_uniform(), gauss(), 1.0, 15).applicable());
    EXPECT_TRUE(nonsmooth_mise_bound(make_uniform(), gauss(), 1.0, 16).applicable());
}

TEST(BoundedVariationMiseBound, UniformValueAndDominance)
{
    auto d = make_uniform();
    auto b = nonsmooth_mise_bound(d, gauss(), 1.0, 100);
    ASSERT_TRUE(b.applicable());
    double L = std::log(100.0);
    double mu1 = std::sqrt(2.0 / pi);
    double c = 4.0 * std::sqrt(2.0) / pi * std::sqrt(mu1) * 4.0 * 1.0;
    double expected = L * L / 10.0 * (c + gauss().roughness / L);
    EXPECT_NEAR(*b.bound, expected, 1e-13);
    EXPECT_NEAR(b.h_used, 1.0 / (10.0 * L), 1e-15);
    EXPECT_GE(*b.bound, exact_mise(d, gauss(), b.h_used, 100).mise);
}

TEST(BoundedVariationMiseBound, UnimodalUsesTwiceTheMaximum)
{
    auto d = constants({{0, 2.0}}, 1.0, true);
    auto uni = nonsmooth_mise_bound(d, gauss(), 0.7, 100, true);
    auto plain = nonsmooth_mise_bound(d, gauss(), 0.7, 100);
    ASSERT_TRUE(uni.applicable());
    EXPECT_NEAR(*uni.bound, *plain.bound, 1e-15);
    d.unimodal = false;
    EXPECT_FALSE(nonsmooth_mise_bound(d, gauss(), 0.7, 100, true).applicable());
}

TEST(SincNonsmoothMiseBound, NonsmoothCorollary)
{
    auto d = make_uniform();
    for (std::size_t n : {16u, 100u, 1000u}) {
        auto b = sinc_mise_bound(d, {SincRegime::nonsmooth}, 1.0, n);
        ASSERT_TRUE(b.optimal);
        EXPECT_NEAR(b.optimal->minimized, 4.0 / (pi * std::sqrt(double(n))), 1e-15);
    }
    for (double v : {2.0, 0.5, 7.0})
        expect_corollary([&](double h0) { return sinc_mise_bound(constants({{0, v}}), {SincRegime::nonsmooth}, h0, 50); });
    for (double a : {1.0, 0.4})
        expect_corollary([&](double h0) {
            return sinc_mise_bound(constants({}, a, true), {SincRegime::nonsmooth_unimodal}, h0, 50);
        });
    auto u = sinc_mise_bound(constants({}, 1.0, true), {SincRegime::nonsmooth_unimodal}, 1.0, 100);
    EXPECT_NEAR(u.optimal->minimized, 4.0 / (pi * 10.0), 1e-15);
}

TEST(SincNonsmoothMiseBound, DominatesExactSincMise)
{
    auto d = make_uniform();
    for (std::size_t n : {16u, 200u}) {
        auto b = sinc_mise_bound(d, {SincRegime::nonsmooth}, 0.5, n);
        EXPECT_GE(*b.bound, sinc_exact_mise(d, b.h_used, n).mise);
    }
}

TEST(SincSmoothMiseBound, SmoothNormalValue)
{
    auto d = make_normal();
    const double V = d.variation.at(2);
    const double n = 1e4;
    auto b = sinc_mise_bound(d, {SincRegime::smooth, 2}, 1.0, 10000);
    ASSERT_TRUE(b.applicable());
    double expected = (12.0 / 5.0 * std::pow(V, 5.0 / 3.0) + 2.0) * std::pow(n, -0.8) / (2.0 * pi);
    EXPECT_NEAR(*b.bound, expected, 1e-15);
    EXPECT_NEAR(b.h_used, std::pow(n, -0.2), 1e-15);
    EXPECT_GE(*b.bound, sinc_exact_mise(d, b.h_used, 10000).mise);
}

TEST(SincSmoothMiseBound, CorollaryMatchesMinimization)
{
    for (int m : {1, 2, 3})
        for (double v : {0.5, 1.51, 4.0})
            expect_corollary([&](double h0) { return sinc_mise_bound(constants({{m, v}}), {SincRegime::smooth, m}, h0, 100); });
}

TEST(SincSmoothSupMseBound, ValueAtUnitConstants)
{
    auto d = constants({{2, 1.0}});
    auto b = sinc_maxmse_bound(d, {SincRegime::smooth, 2}, 1.0, 100);
    ASSERT_TRUE(b.applicable());
    double expected = (9.0 / 4.0 + 2.0 * 1.5) * std::pow(100.0, -2.0 / 3.0) / (pi * pi);
    EXPECT_NEAR(*b.bound, expected, 1e-15);
    EXPECT_FALSE(sinc_maxmse_bound(constants({{1, 1.0}}), {SincRegime::smooth, 1}, 1.0, 100).applicable());
}

TEST(SincSmoothSupMseBound, CorollaryMatchesMinimization)
{
    for (int m : {2, 3, 4})
        for (double v : {0.5, 1.0, 3.0})
            expect_corollary([&](double h0) { return sinc_maxmse_bound(constants({{m, v}}), {SincRegime::smooth, m}, h0, 100); });
}

TEST(SincSupersmoothMiseBound, SupersmoothGate)
{
    auto d = make_normal();
    EXPECT_FALSE(sinc_mise_bound(d, {SincRegime::supersmooth}, 0.01, 100).applicable());
    EXPECT_FALSE(sinc_mise_bound(d, {SincRegime::supersmooth}, 0.01, 50).applicable());
    auto b = sinc_mise_bound(d, {SincRegime::supersmooth}, 1.0, 100);
    ASSERT_TRUE(b.applicable());
    const auto& s = *d.supersmooth;
    double L = std::log(100.0);
    EXPECT_NEAR(*b.bound, (2.0 * std::sqrt(L / s.gamma) + s.B) / (200.0 * pi), 1e-15);
    EXPECT_GE(*b.bound, sinc_exact_mise(d, b.h_used, 100).mise);
    EXPECT_FALSE(sinc_mise_bound(make_uniform(), {SincRegime::supersmooth}, 1.0, 100).applicable());
}

TEST(SincSupersmoothSupMseBound, NormalDominatesExactSupMse)
{
    auto d = make_normal();
    auto b = sinc_maxmse_bound(d, {SincRegime::supersmooth}, 1.0, 100);
    ASSERT_TRUE(b.applicable());
    auto xs = mse_grid(d, 21);
    EXPECT_GE(*b.bound, max_exact_mse(d, make_builtin("sinc"), b.h_used, 100, xs));
}

TEST(SincBandlimitedBound, Bandlimited)
{
    auto d = make_fejer(1.0);
    auto m = sinc_mise_bound(d, {SincRegime::bandlimited}, 1.0, 50);
    ASSERT_TRUE(m.applicable());
    EXPECT_NEAR(*m.bound, 1.0 / (pi * 50.0), 1e-15);
    EXPECT_LE(sinc_exact_mise(d, 1.0, 50).mise, *m.bound);
    auto s = sinc_maxmse_bound(d, {SincRegime::bandlimited}, 1.0, 50);
    EXPECT_NEAR(*s.bound, 2.0 / (pi * pi * 50.0), 1e-15);
    EXPECT_LE(2.0 * *d.a_p / (pi * 50.0), *s.bound + 1e-15);
    EXPECT_FALSE(sinc_mise_bound(d, {SincRegime::bandlimited}, 1.5, 50).applicable());
    EXPECT_FALSE(sinc_mise_bound(make_normal(), {SincRegime::bandlimited}, 0.5, 50).applicable());
}

TEST(SincBandlimitedBound, ConstantBandwidthConsistency)
{
    auto d = make_fejer(1.0);
    double prev_b = kInf;
    double prev_e = kInf;
    for (std::size_t n : {100u, 10000u, 1000000u}) {
        double b = *sinc_mise_bound(d, {SincRegime::bandlimited}, 1.0, n).bound;
        double e = sinc_exact_mise(d, 1.0, n).mise;
        EXPECT_LT(b, prev_b);
        EXPECT_LT(e, prev_e);
        EXPECT_LE(e, b);
        prev_b = b;
        prev_e = e;
    }
    EXPECT_LT(prev_b, 1e-6);
}

TEST(SincGenericBound, GenericForms)
{
    auto d = make_normal();
    auto m = sinc_mise_bound(d, {SincRegime::generic}, 0.4, 100);
    ASSERT_TRUE(m.applicable());
    EXPECT_GE(*m.bound, sinc_exact_mise(d, 0.4, 100).mise);
    auto s = sinc_maxmse_bound(d, {SincRegime::generic}, 0.4, 100);
    ASSERT_TRUE(s.applicable());
    EXPECT_GE(*s.bound, max_exact_mse(d, make_builtin("sinc"), 0.4, 100, mse_grid(d, 21)));
}

TEST(RateStructure, PowerLawPurity)
{
    auto d = make_normal();
    std::vector<std::function<BoundResult(std::size_t)>> fns = {
        [&](std::size_t n) { return conventional_mise_bound(d, gauss(), 2, 0.9, n); },
        [&](std::size_t n) { return conventional_mise_bound(d, gauss(), 1, 0.9, n); },
        [&](std::size_t n) { return conventional_maxmse_bound(d, gauss(), 3, 0.9, n); },
        [&](std::size_t n) { return conventional_maxmse_bound(d, gauss(), 2, 0.9, n); },
        [&](std::size_t n) { return sinc_mise_bound(make_uniform(), {SincRegime::nonsmooth}, 0.9, n); },
        [&](std::size_t n) { return sinc_mise_bound(d, {SincRegime::smooth, 2}, 0.9, n); },
        [&](std::size_t n) { return sinc_maxmse_bound(d, {SincRegime::smooth, 3}, 0.9, n); },
    };
    for (auto& fn : fns) {
        auto ref = fn(16);
        double c = *ref.bound * std::pow(16.0, ref.rate_exponent);
        for (std::size_t n : {100u, 10000u, 1000000u}) {
            auto r = fn(n);
            EXPECT_TRUE(oracle::rel_close(*r.bound * std::pow(double(n), r.rate_exponent), c, 1e-12)) << r.theorem_id;
        }
    }
}

TEST(Amise, NormalConstants)
{
    auto a = amise_conventional(make_normal(), gauss(), 1);
    EXPECT_NEAR(a.roughness_p2, 3.0 / (8.0 * std::sqrt(pi)), 1e-10);
    EXPECT_NEAR(a.roughness_p2, 0.21157, 1e-4);
    EXPECT_NEAR(a.h, 1.0592, 5e-4);
    EXPECT_NEAR(a.h, std::pow(4.0 / 3.0, 0.2), 1e-10);
    auto b = conventional_mise_bound(make_normal(), gauss(), 2, 1.0, 1);
    EXPECT_NEAR(b.optimal->minimized / a.value, 1.2911, 1e-3);
    auto a2 = amise_conventional(make_normal(0.0, 3.0), gauss(), 1);
    EXPECT_NEAR(a2.h, 3.0 * a.h, 1e-9);
    EXPECT_THROW(amise_conventional(make_normal(), make_builtin("sinc"), 1), ConfigError);
    DensityModel bare = make_normal();
    bare.derivative = nullptr;
    EXPECT_THROW(amise_conventional(bare, gauss(), 1), ConfigError);
}

TEST(BoundTable, UniformGating)
{
    auto rows = bound_table(make_uniform(), gauss(), 100);
    std::map<std::string, bool> ok;
    for (const auto& r : rows)
        ok[r.theorem_id] = r.applicable();
    for (const char* id : {"thm1", "thm2", "thm3", "thm4", "thm7", "thm8", "thm9", "thm10", "thm11"})
        EXPECT_FALSE(ok.at(id)) << id;
    EXPECT_TRUE(ok.at("thm5"));
    EXPECT_TRUE(ok.at("thm6"));
}

TEST(BoundTable, NormalRatiosAtLeastOne)
{
    auto d = make_normal();
    auto xs = mse_grid(d, 41);
    for (const auto& r : bound_table(d, gauss(), 100)) {
        if (!r.applicable())
            continue;
        double exact = exact_counterpart(r, d, gauss(), xs);
        EXPECT_GE(*r.bound / exact, 1.0) << r.theorem_id;
    }
}

TEST(Dominance, NormalSlice)
{
    auto d = make_normal();
    auto xs = mse_grid(d, 41);
    for (std::size_t n : {16u, 50u}) {
        for (double h0 : {0.5, 1.0}) {
            auto b = conventional_maxmse_bound(d, gauss(), 3, h0, n);
            EXPECT_GE(*b.bound + 1e-9, max_exact_mse(d, gauss(), b.h_used, n, xs));
            auto c = conventional_mise_bound(d, gauss(), 2, h0, n);
            EXPECT_GE(*c.bound + 1e-9, exact_mise(d, gauss(), c.h_used, n).mise);
        }
    }
}
