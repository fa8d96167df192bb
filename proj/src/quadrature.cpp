#include "kdecf/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace kdecf::quad {

Result integrate(const Fn& f, double a, double b, double rel_tol)
{
    if (a == b)
        return {};
    double error = 0.0;
    double l1 = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 12, rel_tol, &error, &l1);
    // boost reports a relative error; convert to absolute
    return {value, std::abs(error) * std::max(l1, std::abs(value))};
}

Result integrate_panels(const Fn& f, double a, double b, std::size_t panels,
                        std::span<const double> breakpoints)
{
    Result total;
    if (b <= a)
        return total;
    panels = std::max<std::size_t>(panels, 1);
    std::vector<double> cuts;
    cuts.reserve(panels + breakpoints.size() + 1);
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t i = 0; i <= panels; ++i)
        cuts.push_back(i == panels ? b : a + width * static_cast<double>(i));
    for (double p : breakpoints)
        if (p > a && p < b)
            cuts.push_back(p);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate(f, cuts[i], cuts[i + 1]);
    return total;
}

std::vector<double> scan_roots(const Fn& g, double a, double b, std::size_t scan)
{
    std::vector<double> roots;
    const double step = (b - a) / static_cast<double>(scan);
    double x0 = a;
    double g0 = g(x0);
    for (std::size_t i = 1; i <= scan; ++i) {
        double x1 = (i == scan) ? b : a + step * static_cast<double>(i);
        double g1 = g(x1);
        if (g0 == 0.0 && i > 1) {
            roots.push_back(x0);
        } else if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) {
            double lo = x0, hi = x1, glo = g0;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
                double mid = 0.5 * (lo + hi);
                double gm = g(mid);
                if ((gm < 0.0) == (glo < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    return roots;
}

Result integrate_abs(const Fn& g, double a, double b, std::size_t scan)
{
    std::vector<double> cuts{a};
    for (double r : scan_roots(g, a, b, scan))
        cuts.push_back(r);
    cuts.push_back(b);
    Result total;
    auto absg = [&g](double x) { return std::abs(g(x)); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate(absg, cuts[i], cuts[i + 1]);
    return total;
}

double gauss_legendre(const Fn& f, double a, double b, std::size_t panels)
{
    using Rule = boost::math::quadrature::gauss<double, 20>;
    panels = std::max<std::size_t>(panels, 1);
    const double width = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        double lo = a + width * static_cast<double>(i);
        total += Rule::integrate(f, lo, lo + width);
    }
    return total;
}

double trapezoid(std::span<const double> ys, double dx)
{
    if (ys.size() < 2)
        return 0.0;
    double s = 0.5 * (ys.front() + ys.back());
    for (std::size_t i = 1; i + 1 < ys.size(); ++i)
        s += ys[i];
    return s * dx;
}

} // namespace kdecf::quad
