#include "kdecf/estimator.hpp"

#include "kdecf/errors.hpp"
#include "kdecf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kdecf {

double EstimateGrid::integral() const
{
    return quad::trapezoid(ys, spacing());
}

double kde_eval(const Sample& s, const KernelModel& k, double h, double x)
{
    if (!(h > 0.0))
        throw DomainError("bandwidth must be positive");
    double sum = 0.0;
    for (double xj : s.values())
        sum += k.eval((x - xj) / h);
    return sum / (static_cast<double>(s.size()) * h);
}

double sinc_kde_fourier(const Sample& s, double h, double x)
{
    if (!(h > 0.0))
        throw DomainError("bandwidth must be positive");
    const auto vals = s.values();
    double reach = 0.0;
    for (double xj : vals)
        reach = std::max(reach, std::abs(x - xj));
    // at most half a period of the fastest cosine per panel
    const double top = 1.0 / h;
    const std::size_t panels = 1 + static_cast<std::size_t>(std::ceil(top * reach / std::numbers::pi));
    auto integrand = [&](double t) {
        double re = 0.0;
        for (double xj : vals)
            re += std::cos(t * (x - xj));
        return re;
    };
    double integral = quad::gauss_legendre(integrand, 0.0, top, panels);
    return integral / (std::numbers::pi * static_cast<double>(vals.size()));
}

std::vector<double> linspace(double lo, double hi, std::size_t points)
{
    if (points < 2)
        throw DomainError("grid needs at least two points");
    std::vector<double> xs(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        xs[i] = lo + step * static_cast<double>(i);
    xs.back() = hi;
    return xs;
}

std::vector<double> default_grid(const Sample& s, double h, std::size_t points)
{
    double pad = 4.0 * h + 4.0 * s.sd();
    return linspace(s.min() - pad, s.max() + pad, points);
}

EstimateGrid kde_grid(const Sample& s, const KernelModel& k, double h, std::vector<double> xs)
{
    EstimateGrid g;
    g.ys.reserve(xs.size());
    for (double x : xs)
        g.ys.push_back(kde_eval(s, k, h, x));
    g.xs = std::move(xs);
    g.h = h;
    g.kernel_name = k.name;
    return g;
}

namespace {

void check_uniform(const EstimateGrid& g)
{
    if (g.xs.size() < 2 || g.xs.size() != g.ys.size())
        throw DomainError("grid needs matching xs/ys with at least two points");
    const double dx = g.spacing();
    if (!(dx > 0.0))
        throw DomainError("grid must be strictly increasing");
    for (std::size_t i = 1; i < g.xs.size(); ++i) {
        double step = g.xs[i] - g.xs[i - 1];
        if (std::abs(step - dx) > 1e-12 * dx + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(g.xs[i]))
            throw DomainError("grid spacing is not uniform");
    }
}

double positive_mass(const std::vector<double>& ys, double xi, double dx)
{
    std::vector<double> clipped(ys.size());
    std::transform(ys.begin(), ys.end(), clipped.begin(), [xi](double y) { return std::max(y - xi, 0.0); });
    return quad::trapezoid(clipped, dx);
}

} // namespace

EstimateGrid correct_to_density(const EstimateGrid& g)
{
    check_uniform(g);
    const double dx = g.spacing();
    const bool nonneg = std::all_of(g.ys.begin(), g.ys.end(), [](double y) { return y >= 0.0; });
    const double mass0 = positive_mass(g.ys, 0.0, dx);

    EstimateGrid out = g;
    out.corrected = true;
    if (nonneg && std::abs(mass0 - 1.0) <= 1e-9) {
        out.xi = 0.0;
        return out;
    }
    if (mass0 < 1.0)
        throw InfeasibleError("positive part of the estimate integrates to " + std::to_string(mass0)
                              + " < 1; widen the grid or decrease h");

    // mass(xi) is continuous and strictly decreasing while positive
    double lo = 0.0;
    double hi = *std::max_element(g.ys.begin(), g.ys.end());
    if (!(positive_mass(g.ys, hi, dx) <= 1.0))
        throw InfeasibleError("correction bracket does not contain a root");
    double xi = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        xi = 0.5 * (lo + hi);
        double m = positive_mass(g.ys, xi, dx);
        if (std::abs(m - 1.0) <= 1e-13)
            break;
        if (m > 1.0)
            lo = xi;
        else
            hi = xi;
        if (hi - lo <= 1e-17)
            break;
    }
    for (double& y : out.ys)
        y = std::max(y - xi, 0.0);
    out.xi = xi;
    return out;
}

} // namespace kdecf
