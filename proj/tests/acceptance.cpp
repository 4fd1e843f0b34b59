// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <tpflag/flag.hpp>
#include <tpflag/io.hpp>
#include <tpflag/solver.hpp>
#include <tpflag/theta.hpp>
#include <tpflag/totpos.hpp>

using namespace tpflag;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double time_limit_s;  // 0: none
    std::function<Outcome()> body;
};

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(3);
    s << x;
    return s.str();
}

RationalMatrix sl2_lower(const Rational& a) { return RationalMatrix{{1, 0}, {a, 1}}; }

// 1. SL2 torus-set law.
Outcome sl2_law() {
    Outcome out;
    int members = 0, mismatches = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        Rng rng(derive_seed(1, i));
        const Rational a = sample_positive_rational(rng), ap = sample_positive_rational(rng), R = sample_positive_rational(rng);
        const bool member = torus_set_membership(sl2_lower(a), sl2_lower(ap), TorusPoint<Rational>({R})).member;
        if (member != (R * a - ap > 0)) ++mismatches;
        members += member;
    }
    out.pass = mismatches == 0;
    out.detail = "1000 triples, " + std::to_string(members) + " members, " + std::to_string(mismatches) + " mismatches";
    return out;
}

bool sl3_inequalities(const RationalMatrix& u, const RationalMatrix& up, const Rational& R, const Rational& S) {
    const Rational &a = u(1, 0), &b = u(2, 1), &c = u(2, 0), &ap = up(1, 0), &bp = up(2, 1), &cp = up(2, 0);
    return R * a - ap > 0 && S * b - bp > 0 && (R * c - ap * b) * S + ap * bp - cp > 0 && R * (S * (a * b - c) - a * bp) + cp > 0;
}

// 2. SL3 inequality system. Every third sample is pushed onto or past the
// boundary of one of the first two inequalities.
Outcome sl3_inequalities_match() {
    Outcome out;
    int members = 0, mismatches = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const RationalMatrix u = sample_unipotent(3, Triangle::Lower, derive_seed(2, 2 * i));
        const RationalMatrix up = sample_unipotent(3, Triangle::Lower, derive_seed(2, 2 * i + 1));
        Rng rng(derive_seed(20, i));
        Rational R = sample_positive_rational(rng, 3), S = sample_positive_rational(rng, 3);
        if (i % 3 == 1) R = up(1, 0) / u(1, 0) * sample_positive_rational(rng, Rational(1, 3));
        if (i % 3 == 2) S = up(2, 1) / u(2, 1);
        const bool member = torus_set_membership(u, up, TorusPoint<Rational>({R, S})).member;
        if (member != sl3_inequalities(u, up, R, S)) ++mismatches;
        members += member;
    }
    out.pass = mismatches == 0 && members > 0 && members < 500;
    out.detail = "500 tuples, " + std::to_string(members) + " members, " + std::to_string(500 - members) + " violating, " +
                 std::to_string(mismatches) + " mismatches";
    return out;
}

// 3. SL3 closed-form inverse.
Outcome sl3_closed_form() {
    Outcome out;
    double worst = 0.0;
    int rejected_members = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const RationalMatrix u = sample_unipotent(3, Triangle::Lower, derive_seed(3, 2 * i));
        const RationalMatrix up = sample_unipotent(3, Triangle::Lower, derive_seed(3, 2 * i + 1));
        Rng rng(derive_seed(30, i));
        const ZVector<Rational> z{sample_positive_rational(rng, 4), sample_positive_rational(rng, 4)};
        const Sl3Preimages pre = theta_sl3_preimages(u, up, z);
        const RealMatrix uf = matrix_cast<double>(u), upf = matrix_cast<double>(up);
        try {
            const auto back = theta_forward(uf, upf, pre.accepted);
            for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(back[j] - z[j].get_d()) / z[j].get_d());
        } catch (const NotInTorusSet&) {
            worst = INFINITY;
        }
        const auto& r = pre.rejected;
        if (r[0] > 0 && r[1] > 0 && torus_set_membership(uf, upf, TorusPoint<double>(r)).member) ++rejected_members;
    }
    out.pass = worst < 1e-12 && rejected_members == 0;
    out.detail = "500 instances, max rel err " + fmt(worst) + ", rejected roots in T: " + std::to_string(rejected_members);
    return out;
}

// 4. Numeric solver against the closed forms.
Outcome oracle_equivalence() {
    Outcome out;
    double worst = 0.0;
    int multi = 0, failures = 0;
    for (std::size_t n : {2u, 3u}) {
        for (std::uint64_t i = 0; i < 200; ++i) {
            const RationalMatrix u = sample_unipotent(n, Triangle::Lower, derive_seed(4 * n, 2 * i));
            const RationalMatrix up = sample_unipotent(n, Triangle::Lower, derive_seed(4 * n, 2 * i + 1));
            Rng rng(derive_seed(40 + n, i));
            ZVector<Rational> z;
            for (std::size_t j = 1; j < n; ++j) z.push_back(sample_positive_rational(rng));
            SolverConfig config;
            config.starts = 10;
            config.seed = derive_seed(400 + n, i);
            try {
                const SolveReport report = theta_inverse_numeric(u, up, z, config);
                const TorusPoint<double> closed = theta_inverse(u, up, z, InverseMethod::Closed);
                for (std::size_t k = 0; k + 1 < n; ++k) worst = std::max(worst, std::abs(report.solution[k] - closed[k]) / closed[k]);
                if (report.distinct_limits != 1) ++multi;
            } catch (const NoConvergence&) {
                ++failures;
            }
        }
    }
    out.pass = worst < 1e-10 && multi == 0 && failures == 0;
    out.detail = "2 x 200 instances, 10 starts, max rel diff " + fmt(worst) + ", multi-limit " + std::to_string(multi) + ", no-convergence " +
                 std::to_string(failures);
    return out;
}

// 5. Campaign at n = 4.
Outcome conjecture_n4() {
    Outcome out;
    CampaignConfig config;
    config.n = 4;
    config.trials = 100;
    config.seed = 5;
    config.solver.starts = 10;
    const CampaignReport report = verify_conjecture(config);
    const CampaignFiles files{"acceptance_n4.csv", "acceptance_n4_summary.json", "acceptance_counterexamples"};
    write_campaign(report, files);
    std::size_t converged = 0;
    for (const auto& r : report.instances) converged += r.converged;
    const auto multi = report.multi_limit_instances();
    out.pass = converged == 100 && report.max_residual() < 1e-8 && multi.empty() && report.all_ok();
    out.detail = std::to_string(converged) + "/100 converged, max residual " + fmt(report.max_residual()) + ", multi-limit " +
                 std::to_string(multi.size()) + ", max round-trip err " + fmt(report.max_roundtrip_err());
    if (!multi.empty()) out.detail += " (artifacts in " + files.counterexample_dir + "/)";
    return out;
}

// 6. sigma_B round trips.
Outcome sigma_round_trip() {
    Outcome out;
    int v_mismatch = 0, exact_mismatch = 0;
    double z_err = 0.0, g_err = 0.0;
    for (std::size_t n : {2u, 3u}) {
        for (std::uint64_t i = 0; i < 100; ++i) {
            const FibreSample f = sample_fibre_element(n, derive_seed(6 * n, i));
            const CellCoordinates c = sigma_b(f.g, f.B);
            if (c.v != f.v) ++v_mismatch;
            for (std::size_t j = 0; j + 1 < n; ++j) z_err = std::max(z_err, std::abs(Rational(c.zvec[j] - f.zvec[j]).get_d()) / f.zvec[j].get_d());
            const RealMatrix back = sigma_b_inverse(c, f.B);
            g_err = std::max(g_err, max_abs_diff(back, matrix_cast<double>(f.g)) / max_abs(f.g));
            if (n == 2 && sigma_b_inverse_exact(c, f.B) != f.g) ++exact_mismatch;
        }
    }
    out.pass = v_mismatch == 0 && z_err <= 1e-10 && exact_mismatch == 0 && g_err <= 1e-10;
    out.detail = "2 x 100 elements, v mismatches " + std::to_string(v_mismatch) + ", max zvec err " + fmt(z_err) + ", n=2 exact mismatches " +
                 std::to_string(exact_mismatch) + ", max rel g err " + fmt(g_err);
    return out;
}

// 7. Partition and Perron-line agreement.
Outcome partition() {
    Outcome out;
    int failures = 0, checks = 0;
    double worst = 0.0;
    for (std::size_t n : {2u, 3u, 4u}) {
        for (std::uint64_t i = 0; i < 100; ++i) {
            const RationalMatrix g = sample_g_positive(n, derive_seed(7 * n, i));
            for (const auto& J : all_parabolic_indices(n)) {
                ++checks;
                if (!check_partition(g, J)) ++failures;
                worst = std::max(worst, classify(g, J).max_distance());
            }
        }
    }
    out.pass = failures == 0 && worst <= 1e-8;
    out.detail = std::to_string(checks) + " (g, J) pairs, " + std::to_string(failures) + " failures, max line distance " + fmt(worst);
    return out;
}

// 8. gamma_P and split_cell are mutually inverse.
Outcome gamma_bijection() {
    Outcome out;
    int failures = 0, checks = 0;
    for (std::size_t n : {2u, 3u, 4u}) {
        for (const auto& J : all_parabolic_indices(n)) {
            for (std::uint64_t i = 0; i < 100; ++i) {
                ++checks;
                const std::uint64_t seed = derive_seed(8 * n + J.size(), i);
                const ParabolicPoint<Rational> P = sample_parabolic_point(n, J, derive_seed(seed, 1));
                const auto v = sample_positive<Rational>(longest_element(J, n), derive_seed(seed, 2));
                const auto split = split_cell(gamma_p_point(P, v).rep, J);
                const bool forward = split.parabolic == P.rep && split.fibre_params == v;

                const RationalMatrix u1 = sample_unipotent(n, Triangle::Lower, derive_seed(seed, 3));
                const auto s = split_cell(u1, J);
                const bool backward = gamma_p_point({J, s.parabolic}, s.fibre_params).rep == u1;
                if (!forward || !backward) ++failures;
            }
        }
    }
    out.pass = failures == 0;
    out.detail = std::to_string(checks) + " samples over all J, n <= 4, " + std::to_string(failures) + " failures";
    return out;
}

// 9. extract_params inverts evaluate_params.
Outcome parametrization() {
    Outcome out;
    int failures = 0;
    for (std::size_t n = 2; n <= 5; ++n) {
        for (std::uint64_t i = 0; i < 200; ++i) {
            const auto p = sample_positive<Rational>(longest_element(n), derive_seed(9 * n, i));
            const Triangle which = i % 2 ? Triangle::Upper : Triangle::Lower;
            if (extract_params(evaluate_params(p, which, n), p.word, which) != p) ++failures;
        }
    }
    out.pass = failures == 0;
    out.detail = "4 x 200 tuples, " + std::to_string(failures) + " failures";
    return out;
}

// 10. Simple positive spectrum.
Outcome spectrum() {
    Outcome out;
    int failures = 0;
    double min_gap = INFINITY;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const std::size_t n = 2 + i % 4;
        const RationalMatrix g = sample_g_positive(n, derive_seed(10, i));
        try {
            const EigenFlag flag = eigen_flag(matrix_cast<double>(g));
            for (std::size_t k = 0; k < n; ++k) {
                if (!(flag.eigenvalues[k] > 0)) ++failures;
                if (k) min_gap = std::min(min_gap, flag.eigenvalues[k - 1] - flag.eigenvalues[k]);
            }
        } catch (const EigenvalueCollision&) {
            ++failures;
        }
    }
    out.pass = failures == 0 && min_gap > 1e-10;
    out.detail = "200 matrices, n = 2..5, min gap " + fmt(min_gap) + ", failures " + std::to_string(failures);
    return out;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "SL2 torus-set law Ra - a' > 0", 5, sl2_law},
        {2, "SL3 membership equals the four inequalities", 30, sl3_inequalities_match},
        {3, "SL3 closed-form inverse round trip, rejected root outside T", 30, sl3_closed_form},
        {4, "numeric inverse matches closed forms, n = 2, 3", 0, oracle_equivalence},
        {5, "n = 4 campaign: full convergence, unique limits", 600, conjecture_n4},
        {6, "sigma_B round trip, n = 2, 3", 60, sigma_round_trip},
        {7, "partition check and Perron-line agreement, n <= 4", 120, partition},
        {8, "gamma_P / split_cell bijection, n <= 4", 0, gamma_bijection},
        {9, "extract_params o evaluate_params = id, n <= 5", 0, parametrization},
        {10, "distinct positive eigenvalues, gap > 1e-10", 0, spectrum},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0 && seconds >= c.time_limit_s) {
            o.pass = false;
            o.detail += ", over time limit " + fmt(c.time_limit_s) + " s";
        }
        failed += !o.pass;
        std::printf("[%s] criterion %d: %s -- %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
