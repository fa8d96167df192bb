#pragma once

#include "kdecf/charfun.hpp"
#include "kdecf/kernels.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kdecf {

struct SelectorResult {
    std::string method;
    double h = 0.0;
    std::vector<std::pair<double, double>> curve; ///< (h, Q) when a criterion was minimized
    std::size_t n = 0;
    std::string kernel;
    std::string q_estimator;
    bool degenerate = false;
    std::string warning;
};

/// Gaussian-kernel normal-reference constant, derived from the AMISE formula.
double normal_rule_constant();

/// h = c sigma_hat n^-1/5 with c = normal_rule_constant().
SelectorResult rule_of_thumb_normal(double sigma_hat, std::size_t n);

enum class BoundRuleKind { mise_thm1, maxmse_thm3 };

struct BoundRuleConstants {
    std::optional<double> v2; ///< upper bound on V(p'')
    std::optional<double> v3; ///< upper bound on V(p''')
    std::optional<double> a;  ///< upper bound on sup p
};

/// Closed-form minimizer of the MISE (mise_thm1) or sup-MSE (maxmse_thm3)
/// bound. Throws ConfigError when a required constant is missing.
SelectorResult bound_rule(BoundRuleKind kind, const BoundRuleConstants& c, const KernelModel& k, std::size_t n);

enum class QEstimator { unbiased, parametric };

/// `full` estimates every term of the exact MISE and so agrees with
/// least-squares cross-validation up to an h-free constant; `lemma2` keeps
/// the variance term at its upper bound R(K)/(nh).
enum class CvForm { full, lemma2 };

struct CvOptions {
    QEstimator q = QEstimator::unbiased;
    std::optional<double> sigma_hat; ///< parametric q; defaults to the sample sd
    CvForm form = CvForm::full;
};

/// 60 log-spaced points over [0.05, 3] sigma_hat n^-1/5.
std::vector<double> default_h_grid(const Sample& s, std::size_t points = 60);

/// Criterion Q_n(h) with the h-free part dropped.
double cv_criterion(const Sample& s, const KernelModel& k, double h, const CvOptions& opt = {});

/// argmin of Q_n over `h_grid`. Rejects an empty grid and n < 2 for the
/// unbiased estimator.
SelectorResult cv_bandwidth(const Sample& s, const KernelModel& k, std::span<const double> h_grid,
                            const CvOptions& opt = {});

/// Same over default_h_grid(s); degenerate samples are rejected.
SelectorResult cv_bandwidth(const Sample& s, const KernelModel& k, const CvOptions& opt = {});

enum class PlanTarget { mise, max_mse };
enum class PlanEstimator { kernel, sinc_nonsmooth, sinc_smooth };

struct PlanRequest {
    PlanTarget target = PlanTarget::mise;
    PlanEstimator estimator = PlanEstimator::kernel;
    double epsilon = 0.0;
    std::optional<double> v2;
    std::optional<double> v3;
    std::optional<double> a;
    std::optional<double> v; ///< V(p) for the nonsmooth sinc regime, V(p^(m)) for the smooth one
    int m = 2;
};

struct PlanResult {
    std::size_t n0 = 0;
    double bound = 0.0;   ///< minimized bound at n0
    double h = 0.0;       ///< bandwidth minimizing the bound at n0
    std::string theorem_id;
};

/// Minimized bound at sample size n for the corollary selected by `req`.
/// Throws ConfigError when that corollary is unavailable.
double planned_bound(const PlanRequest& req, const KernelModel& k, std::size_t n);

/// Smallest n with planned_bound(n) <= epsilon.
PlanResult plan_sample_size(const PlanRequest& req, const KernelModel& k);

} // namespace kdecf
