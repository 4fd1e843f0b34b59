#ifndef TPFLAG_SOLVER_HPP
#define TPFLAG_SOLVER_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "polynomial.hpp"
#include "random.hpp"
#include "theta.hpp"
#include "totpos.hpp"

namespace tpflag {

struct SolverConfig {
    std::size_t starts = 10;
    std::size_t max_iterations = 100;
    /// Newton stops when max_j |log z_j - log target_j| falls below this.
    double newton_tolerance = 1e-13;
    /// A start counts as converged when max_j |z_j - target_j| / target_j <= this.
    double residual_tolerance = 1e-8;
    /// Limits closer than this (relative, coordinatewise in R) are one limit.
    double cluster_threshold = 1e-6;
    /// Strict-inequality margin of the float membership test.
    double membership_margin = 1e-14;
    /// Starts are log-uniform in [-start_radius, start_radius] per coordinate.
    double start_radius = 3.0;
    std::size_t max_halvings = 60;
    std::uint64_t seed = 0;
};

struct StartOutcome {
    std::vector<double> limit;  // R coordinates
    double residual = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    bool feasible_start = false;
    bool converged = false;
};

struct SolveReport {
    TorusPoint<double> solution;
    double residual = std::numeric_limits<double>::infinity();
    std::size_t starts_tried = 0;
    std::size_t converged_starts = 0;
    std::size_t distinct_limits = 0;
    std::vector<std::size_t> iterations;
    /// One representative per cluster of converged limits.
    std::vector<std::vector<double>> limits;
};

/// No start converged. Carries the full report for diagnostics.
class SolveFailure : public NoConvergence {
public:
    SolveFailure(const std::string& what, SolveReport report) : NoConvergence(what), report_(std::move(report)) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// z(u, u', t) as a function of log torus coordinates, with exact Euler
/// derivatives R_m dz_j/dR_m from the polynomial form.
class ZMap {
public:
    ZMap(const RationalMatrix& u, const RationalMatrix& uprime)
        : n_(u.rows()), z_(z_polynomials(u, uprime)), u_(matrix_cast<double>(u)), uprime_(matrix_cast<double>(uprime)) {
        for (const auto& p : z_) {
            std::vector<Polynomial> row;
            for (std::size_t m = 0; m + 1 < n_; ++m) row.push_back(p.euler_derivative(m));
            euler_.push_back(std::move(row));
        }
    }

    std::size_t dimension() const { return n_; }
    const std::vector<Polynomial>& polynomials() const { return z_; }

    std::vector<double> values(const std::vector<double>& x) const {
        std::vector<double> out;
        for (const auto& p : z_) out.push_back(p.evaluate_log(x));
        return out;
    }

    /// Jacobian of log z with respect to log R.
    Eigen::MatrixXd log_jacobian(const std::vector<double>& x, const std::vector<double>& z) const {
        const auto k = static_cast<Eigen::Index>(n_ - 1);
        Eigen::MatrixXd jac(k, k);
        for (Eigen::Index j = 0; j < k; ++j)
            for (Eigen::Index m = 0; m < k; ++m) jac(j, m) = euler_[j][m].evaluate_log(x) / z[j];
        return jac;
    }

    bool in_torus_set(const std::vector<double>& x, double margin) const {
        std::vector<double> r;
        for (double xi : x) {
            const double ri = std::exp(xi);
            if (!std::isfinite(ri) || ri <= 0.0) return false;
            r.push_back(ri);
        }
        return torus_set_membership(u_, uprime_, TorusPoint<double>(r), margin).member;
    }

private:
    std::size_t n_;
    std::vector<Polynomial> z_;
    std::vector<std::vector<Polynomial>> euler_;
    RealMatrix u_;
    RealMatrix uprime_;
};

namespace detail {

inline double max_abs_log_mismatch(const std::vector<double>& z, const std::vector<double>& log_target) {
    double worst = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (!(z[j] > 0)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(std::log(z[j]) - log_target[j]));
    }
    return worst;
}

inline double sum_sq_log_mismatch(const std::vector<double>& z, const std::vector<double>& log_target) {
    double total = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (!(z[j] > 0)) return std::numeric_limits<double>::infinity();
        const double d = std::log(z[j]) - log_target[j];
        total += d * d;
    }
    return total;
}

inline double z_residual(const std::vector<double>& z, const std::vector<double>& target) {
    double worst = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) worst = std::max(worst, std::abs(z[j] - target[j]) / target[j]);
    return worst;
}

inline double relative_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(a[i]), std::abs(b[i])));
    }
    return worst;
}

}  // namespace detail

/// Damped Newton on F(x) = log z(exp x) - log target from one start x0.
/// Each step is halved until the iterate stays in T_{u,u'} and ||F||_2
/// decreases; a start outside T_{u,u'} is first shifted along the diagonal.
inline StartOutcome newton_from(const ZMap& map, const std::vector<double>& target, std::vector<double> x, const SolverConfig& config) {
    StartOutcome out;
    std::vector<double> log_target;
    for (double v : target) log_target.push_back(std::log(v));

    for (int shift = 0; shift < 200 && !map.in_torus_set(x, config.membership_margin); ++shift) {
        for (double& xi : x) xi += 1.0;
    }
    if (!map.in_torus_set(x, config.membership_margin)) return out;
    out.feasible_start = true;

    std::vector<double> z = map.values(x);
    for (; out.iterations < config.max_iterations; ++out.iterations) {
        if (detail::max_abs_log_mismatch(z, log_target) < config.newton_tolerance) break;
        const Eigen::MatrixXd jac = map.log_jacobian(x, z);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(z.size()));
        for (std::size_t j = 0; j < z.size(); ++j) rhs(static_cast<Eigen::Index>(j)) = log_target[j] - std::log(z[j]);
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) break;
        const Eigen::VectorXd step = lu.solve(rhs);

        const double merit = detail::sum_sq_log_mismatch(z, log_target);
        double alpha = 1.0;
        bool accepted = false;
        for (std::size_t h = 0; h <= config.max_halvings; ++h, alpha *= 0.5) {
            std::vector<double> trial = x;
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] += alpha * step(static_cast<Eigen::Index>(i));
            if (!map.in_torus_set(trial, config.membership_margin)) continue;
            std::vector<double> trial_z = map.values(trial);
            if (detail::sum_sq_log_mismatch(trial_z, log_target) < merit) {
                x = std::move(trial);
                z = std::move(trial_z);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    for (double xi : x) out.limit.push_back(std::exp(xi));
    out.residual = detail::z_residual(z, target);
    out.converged = std::isfinite(out.residual) && out.residual <= config.residual_tolerance;
    return out;
}

/// Multi-start damped Newton for t with z(u, u', t) = target. Starts are
/// deterministic from config.seed. Converged limits are clustered; the
/// solution is the best-residual limit. Throws SolveFailure when no start
/// converges.
inline SolveReport theta_inverse_numeric(const RationalMatrix& u, const RationalMatrix& uprime, const std::vector<double>& target,
                                         const SolverConfig& config = {}) {
    const std::size_t n = u.rows();
    if (target.size() + 1 != n) throw std::invalid_argument("theta_inverse_numeric: wrong number of z components");
    for (double v : target) {
        if (!(v > 0) || !std::isfinite(v)) throw DomainError("theta_inverse_numeric: z components must be positive");
    }
    for (const auto* m : {&u, &uprime}) {
        if (!is_totally_positive_unitriangular(*m, Triangle::Lower).member) {
            throw DomainError("theta_inverse_numeric: u and u' must be in U-_{>0}");
        }
    }
    if (config.starts == 0) throw std::invalid_argument("theta_inverse_numeric: at least one start is required");

    const ZMap map(u, uprime);
    Rng rng(config.seed);
    SolveReport report;
    std::optional<StartOutcome> best;
    for (std::size_t s = 0; s < config.starts; ++s) {
        std::vector<double> x0(n - 1);
        for (double& xi : x0) xi = rng.uniform(-config.start_radius, config.start_radius);
        StartOutcome outcome = newton_from(map, target, std::move(x0), config);
        ++report.starts_tried;
        report.iterations.push_back(outcome.iterations);
        if (!outcome.converged) continue;
        ++report.converged_starts;
        const bool known = std::any_of(report.limits.begin(), report.limits.end(), [&](const std::vector<double>& rep) {
            return detail::relative_distance(rep, outcome.limit) < config.cluster_threshold;
        });
        if (!known) report.limits.push_back(outcome.limit);
        if (!best || outcome.residual < best->residual) best = std::move(outcome);
    }
    report.distinct_limits = report.limits.size();
    if (!best) {
        throw SolveFailure("no start met the residual tolerance (" + std::to_string(report.starts_tried) + " starts)", report);
    }
    report.solution = TorusPoint<double>(best->limit);
    report.residual = best->residual;
    return report;
}

inline SolveReport theta_inverse_numeric(const RationalMatrix& u, const RationalMatrix& uprime, const ZVector<Rational>& target,
                                         const SolverConfig& config = {}) {
    std::vector<double> t;
    for (const auto& v : target) t.push_back(v.get_d());
    return theta_inverse_numeric(u, uprime, t, config);
}

enum class InverseMethod { Auto, Closed, Numeric };

/// Preimage of z under t -> z(u, u', t): closed forms for n = 2, 3 under
/// Auto/Closed, multi-start Newton otherwise.
inline TorusPoint<double> theta_inverse(const RationalMatrix& u, const RationalMatrix& uprime, const ZVector<Rational>& z,
                                        InverseMethod method = InverseMethod::Auto, const SolverConfig& config = {}) {
    const std::size_t n = u.rows();
    if (method == InverseMethod::Closed && n > 3) throw std::invalid_argument("closed-form inverse exists only for n <= 3");
    if (method != InverseMethod::Numeric && n == 2) {
        return TorusPoint<double>({theta_inverse_sl2(u, uprime, z)[0].get_d()});
    }
    if (method != InverseMethod::Numeric && n == 3) return theta_inverse_sl3(u, uprime, z);
    return theta_inverse_numeric(u, uprime, z, config).solution;
}

struct CampaignConfig {
    std::size_t n = 4;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    SolverConfig solver;
    /// 0 means std::thread::hardware_concurrency().
    std::size_t threads = 0;
};

struct InstanceResult {
    std::size_t instance_id = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    RationalMatrix u;
    RationalMatrix uprime;
    ZVector<Rational> z;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    std::size_t starts = 0;
    std::size_t distinct_limits = 0;
    std::size_t iterations_max = 0;
    /// Relative error of inverse(forward(t0)) against a sampled t0 in T_{u,u'}.
    double roundtrip_err = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> limits;
    std::string failure;
};

struct CampaignReport {
    CampaignConfig config;
    std::vector<InstanceResult> instances;

    std::size_t successes() const {
        return static_cast<std::size_t>(std::count_if(instances.begin(), instances.end(), [](const InstanceResult& r) {
            return r.converged && r.distinct_limits == 1 && r.failure.empty();
        }));
    }
    double success_rate() const { return instances.empty() ? 0.0 : static_cast<double>(successes()) / instances.size(); }
    double max_residual() const {
        double worst = 0.0;
        for (const auto& r : instances) worst = std::max(worst, r.residual);
        return worst;
    }
    double max_roundtrip_err() const {
        double worst = 0.0;
        for (const auto& r : instances) worst = std::max(worst, r.roundtrip_err);
        return worst;
    }
    std::vector<std::size_t> multi_limit_instances() const {
        std::vector<std::size_t> ids;
        for (const auto& r : instances)
            if (r.distinct_limits > 1) ids.push_back(r.instance_id);
        return ids;
    }
    bool all_ok() const { return successes() == instances.size(); }
};

/// Samples a point of T_{u,u'} with rational coordinates: positive
/// rationals, doubled jointly until the twisted product is totally positive.
inline TorusPoint<Rational> sample_torus_point(const RationalMatrix& u, const RationalMatrix& uprime, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Rational> r;
    for (std::size_t i = 0; i + 1 < u.rows(); ++i) r.push_back(sample_positive_rational(rng));
    for (int attempt = 0; attempt < 256; ++attempt) {
        const TorusPoint<Rational> t(r);
        if (torus_set_membership(u, uprime, t).member) return t;
        for (auto& ri : r) ri *= 2;
    }
    throw std::logic_error("sample_torus_point: no feasible point found");
}

/// One campaign instance, deterministic from (seed, instance_id).
inline InstanceResult run_instance(std::size_t n, std::uint64_t campaign_seed, std::size_t id, const SolverConfig& base) {
    InstanceResult r;
    r.instance_id = id;
    r.n = n;
    r.seed = derive_seed(campaign_seed, id);
    r.u = sample_unipotent(n, Triangle::Lower, derive_seed(r.seed, 1));
    r.uprime = sample_unipotent(n, Triangle::Lower, derive_seed(r.seed, 2));
    Rng rng(derive_seed(r.seed, 3));
    for (std::size_t j = 1; j < n; ++j) r.z.push_back(sample_positive_rational(rng));

    SolverConfig config = base;
    config.seed = derive_seed(r.seed, 4);
    try {
        const SolveReport report = theta_inverse_numeric(r.u, r.uprime, r.z, config);
        r.converged = true;
        r.residual = report.residual;
        r.starts = report.starts_tried;
        r.distinct_limits = report.distinct_limits;
        r.iterations_max = *std::max_element(report.iterations.begin(), report.iterations.end());
        r.limits = report.limits;
    } catch (const SolveFailure& failure) {
        r.starts = failure.report().starts_tried;
        r.iterations_max = *std::max_element(failure.report().iterations.begin(), failure.report().iterations.end());
        r.failure = failure.what();
    }

    // inverse(forward(t0)) against an independently sampled t0.
    const TorusPoint<Rational> t0 = sample_torus_point(r.u, r.uprime, derive_seed(r.seed, 5));
    const ZVector<Rational> z0 = theta_forward(r.u, r.uprime, t0);
    config.seed = derive_seed(r.seed, 6);
    try {
        const SolveReport back = theta_inverse_numeric(r.u, r.uprime, z0, config);
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double expected = t0[i].get_d();
            worst = std::max(worst, std::abs(back.solution[i] - expected) / expected);
        }
        r.roundtrip_err = worst;
        if (back.distinct_limits > 1) {
            r.distinct_limits = std::max(r.distinct_limits, back.distinct_limits);
            if (r.failure.empty()) r.failure = "multiple limits on the round-trip solve";
        }
    } catch (const SolveFailure& failure) {
        if (r.failure.empty()) r.failure = std::string("round-trip solve: ") + failure.what();
    }
    return r;
}

/// Runs `trials` independent instances, in parallel when threads != 1.
/// Output order is by instance id regardless of scheduling.
inline CampaignReport verify_conjecture(const CampaignConfig& config) {
    if (config.n < 2 || config.n > 5) throw std::out_of_range("verify_conjecture: requires 2 <= n <= 5");
    if (config.trials == 0) throw std::invalid_argument("verify_conjecture: trials must be >= 1");
    CampaignReport report;
    report.config = config;
    report.instances.resize(config.trials);
    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, config.trials);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t id = next++; id < config.trials; id = next++) {
            report.instances[id] = run_instance(config.n, config.seed, id, config.solver);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return report;
}

}  // namespace tpflag

#endif  // TPFLAG_SOLVER_HPP
