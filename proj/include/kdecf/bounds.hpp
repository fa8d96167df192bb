#pragma once

#include "kdecf/charfun.hpp"
#include "kdecf/kernels.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kdecf {

enum class RiskKind { mise, max_mse };

std::string to_string(RiskKind kind);

struct Assumption {
    std::string name;
    bool satisfied = false;
    bool machine_checked = true; ///< false when the hypothesis is taken on the user's word
};

struct Optimal {
    double h0_star = 0.0;
    double h_star = 0.0;   ///< bandwidth at the given n
    double minimized = 0.0; ///< closed-form minimum of the bound at the given n
};

/// Outcome of one risk bound. An unmet hypothesis makes the result
/// inapplicable: `bound` and `optimal` are then empty.
struct BoundResult {
    std::string theorem_id;
    RiskKind kind = RiskKind::mise;
    bool sinc = false;          ///< bound concerns the sinc estimator
    double h0 = 0.0;            ///< free constant of the bandwidth sequence
    double h_used = 0.0;        ///< bandwidth the bound refers to at this n
    double rate_exponent = 0.0; ///< bound proportional to n^-rate (0 when not a pure power law)
    std::size_t n = 0;
    std::optional<double> bound;
    std::vector<Assumption> assumptions;
    std::optional<Optimal> optimal;

    bool applicable() const { return bound.has_value(); }
    /// Names of the hypotheses that failed, comma separated.
    std::string failed_assumptions() const;
};

/// sup-MSE bound for a density kernel at bandwidth h.
BoundResult lemma1_mse_bound(const DensityModel& d, const KernelModel& k, double h, std::size_t n);

/// MISE bound for a density kernel at bandwidth h.
BoundResult lemma2_mise_bound(const DensityModel& d, const KernelModel& k, double h, std::size_t n);

/// MISE bound with h_n = h0 n^-1/5 (m = 2) or h0 n^-1/3 (m = 1).
BoundResult conventional_mise_bound(const DensityModel& d, const KernelModel& k, int m, double h0, std::size_t n);

/// sup-MSE bound with h_n = h0 n^-1/5 (m = 3) or h0 n^-1/3 (m = 2).
BoundResult conventional_maxmse_bound(const DensityModel& d, const KernelModel& k, int m, double h0,
                                      std::size_t n);

/// MISE bound for densities of bounded variation, h_n = h0 / (sqrt(n) log n),
/// n >= 16. With `unimodal` the variation is replaced by 2a.
BoundResult nonsmooth_mise_bound(const DensityModel& d, const KernelModel& k, double h0, std::size_t n,
                                 bool unimodal = false);

enum class SincRegime { nonsmooth, nonsmooth_unimodal, smooth, supersmooth, bandlimited, generic };

struct SincSpec {
    SincRegime regime = SincRegime::generic;
    int m = 0; ///< smoothness order for SincRegime::smooth
};

std::string to_string(SincRegime regime);

/// Sinc-estimator MISE bounds. `h` is h0 for the nonsmooth, smooth and
/// supersmooth regimes and the bandwidth itself for bandlimited and generic.
BoundResult sinc_mise_bound(const DensityModel& d, SincSpec spec, double h, std::size_t n);

/// Sinc-estimator sup-MSE bounds (smooth needs m >= 2; nonsmooth regimes
/// are not covered and come back inapplicable).
BoundResult sinc_maxmse_bound(const DensityModel& d, SincSpec spec, double h, std::size_t n);

struct AmiseResult {
    double h = 0.0;
    double value = 0.0;
    double roughness_p2 = 0.0; ///< R(p'')
};

/// Classical AMISE-optimal bandwidth and minimal AMISE. R(p'') is obtained
/// by quadrature of the second derivative. Throws ConfigError when p'' is
/// unavailable or the kernel lacks a second moment.
AmiseResult amise_conventional(const DensityModel& d, const KernelModel& k, std::size_t n);

/// Exact counterpart of a bound: MISE for mise bounds, max over `xs` of the
/// pointwise MSE for sup-MSE bounds, each at r.h_used with the estimator the
/// bound refers to.
double exact_counterpart(const BoundResult& r, const DensityModel& d, const KernelModel& k,
                         std::span<const double> xs);

/// One row per theorem family for a fixed n: lemma rows use h = n^-1/5, the
/// theorems use the corollary h0 when one exists and h0 = 1 otherwise.
std::vector<BoundResult> bound_table(const DensityModel& d, const KernelModel& k, std::size_t n);

} // namespace kdecf
