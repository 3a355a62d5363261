// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "infprod/analyzer.hpp"
#include "infprod/cli.hpp"
#include "infprod/product_engine.hpp"
#include "oracles.hpp"

using namespace infprod;
using oracle::fro_diff;

namespace {

struct Result {
    bool pass = true;
    std::string detail;
};

void report(int id, const char* title, const Result& r, int& failures) {
    std::printf("[%s] criterion %d: %s (%s)\n", r.pass ? "PASS" : "FAIL", id, title, r.detail.c_str());
    if (!r.pass) ++failures;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Largest identity residual seen while running criteria 1-3.
double g_max_residual = 0.0;

ProductState tracked_step(const ProductState& s, const BlockUpperTriangular& a,
                          const ContractionCertificate& cert) {
    ProductState next = step(s, a, cert);
    g_max_residual = std::max(g_max_residual, next.identity_residual);
    return next;
}

BlockUpperTriangular scalar_factor(double b, double c) {
    return {ComplexMatrix{{b}}, ComplexMatrix{{c}}};
}

Result oracle_equivalence() {
    std::mt19937_64 rng(1001);
    const auto cert = ContractionCertificate::declared(NormKind::inf(), 0.9);
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::size_t checks = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const std::size_t d = 2 + rng() % 7;
        const std::size_t s = 1 + rng() % (d - 1);
        const std::size_t len = 1 + rng() % 50;
        std::vector<BlockUpperTriangular> seq;
        for (std::size_t k = 0; k < len; ++k) seq.push_back(oracle::random_factor(rng, s, d - s, 0.9, 3.0));
        ProductState state = ProductState::initial(s, d - s);
        for (std::size_t n = 1; n <= len; ++n) {
            state = tracked_step(state, seq[n - 1], cert);
            const ComplexMatrix dense = dense_partial_product(seq, n);
            worst = std::max(worst, fro_diff(state.x, dense.block(0, s, s, d - s)));
            worst = std::max(worst, fro_diff(state.gamma, dense.block(s, s, d - s, d - s)));
            ++checks;
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst <= 1e-11 && secs < 10.0,
            std::to_string(trials) + " sequences, " + std::to_string(checks) +
                " prefixes, max Frobenius gap " + num(worst) + ", " + num(secs) + " s"};
}

Result eventually_constant() {
    std::mt19937_64 rng(2002);
    const auto cert = ContractionCertificate::declared(NormKind::inf(), 0.9);
    const std::size_t horizon = 400;
    Result out;
    double worst_soundness = -1.0, worst_late = 0.0;
    std::size_t late_checks = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 2 + rng() % 5;
        const std::size_t s = 1 + rng() % (d - 1), tail = d - s;
        const std::size_t prefix = rng() % 20;
        std::vector<BlockUpperTriangular> seq;
        for (std::size_t k = 0; k <= prefix; ++k) seq.push_back(oracle::random_factor(rng, s, tail, 0.9, 2.0));
        const BlockUpperTriangular last = seq.back();
        while (seq.size() < horizon) seq.push_back(last);

        // Limit oracle: L = B (I - C)^{-1} via the Neumann series of the last factor.
        ComplexMatrix l = last.b(), term = last.b();
        for (int k = 0; k < 2000 && oracle::fro(term) > 1e-300; ++k) {
            term = oracle::from_grid(oracle::triple_loop(oracle::to_grid(term), oracle::to_grid(last.c())));
            l += term;
        }
        const ComplexMatrix limit = limit_matrix(l);

        std::vector<ProductState> states;
        ProductState state = ProductState::initial(s, tail);
        for (std::size_t n = 1; n <= horizon; ++n) {
            state = tracked_step(state, seq[n - 1], cert);
            states.push_back(state);
        }
        // Conservative Frobenius bound: ||M||_F <= sqrt(rows) ||M||_inf applied to
        // ||X_n - L|| <= bound_n + sum_{k >= n} ||Y_k|| and ||Gamma_n|| <= r^n.
        std::vector<double> tail_y(horizon + 1, 0.0);
        for (std::size_t n = horizon; n-- > 0;) tail_y[n] = tail_y[n + 1] + states[n].norm_y;
        bool reached = false;
        for (std::size_t n = 1; n <= horizon; ++n) {
            const auto& st = states[n - 1];
            worst_soundness = std::max(worst_soundness, st.norm_d - st.bound);
            // norm_y at step n is ||L_{n+1} - L_n||, so the tail from n starts at index n-1.
            const double bound = std::sqrt(double(s)) * (st.bound + tail_y[n - 1]) +
                                 std::sqrt(double(tail)) * std::pow(0.9, double(n));
            const ComplexMatrix p = to_dense(BlockUpperTriangular(s, st.x, st.gamma));
            const double actual = fro_diff(p, limit);
            if (actual > bound + 1e-10) {
                out.pass = false;
                out.detail = "bound violated at trial " + std::to_string(t) + " n=" + std::to_string(n);
                return out;
            }
            if (bound <= 1e-8) reached = true;
            if (reached) {
                worst_late = std::max(worst_late, actual);
                ++late_checks;
            }
        }
        if (!reached) {
            out.pass = false;
            out.detail = "bound never reached 1e-8 in trial " + std::to_string(t);
            return out;
        }
    }
    out.pass = worst_soundness <= 1e-10 && worst_late <= 1e-8;
    out.detail = "200 trials; max(||D_n|| - bound) " + num(worst_soundness) +
                 "; max distance after bound <= 1e-8: " + num(worst_late) + " over " +
                 std::to_string(late_checks) + " steps";
    return out;
}

Result refutation() {
    const std::vector<BlockUpperTriangular> cycle = {scalar_factor(1, 0.5), scalar_factor(2, 0.5)};
    // Fixed-point oracle: composing x -> b + x c over one period from each phase.
    auto phase_limit = [&](std::size_t first) {
        const double b1 = cycle[first].b()(0, 0).real(), c1 = cycle[first].c()(0, 0).real();
        const double b2 = cycle[1 - first].b()(0, 0).real(), c2 = cycle[1 - first].c()(0, 0).real();
        // x -> b2 + (b1 + x c1) c2
        return (b2 + b1 * c2) / (1.0 - c1 * c2);
    };
    const double even = phase_limit(0);  // ends on A_2
    const double odd = phase_limit(1);   // ends on A_1

    const auto cert = ContractionCertificate::declared(NormKind::inf(), 0.5);
    ProductState state = ProductState::initial(1, 1);
    double gap_even = 0.0, gap_odd = 0.0;
    for (std::size_t n = 1; n <= 200; ++n) {
        state = tracked_step(state, cycle[(n - 1) % 2], cert);
        const double x = state.x(0, 0).real();
        if (n >= 199) (n % 2 ? gap_odd : gap_even) = std::abs(x - (n % 2 ? odd : even));
    }
    const auto rep = analyze(SequencePresentation::periodic(cycle));
    const bool oracle_ok = std::abs(even - 10.0 / 3.0) < 1e-15 && std::abs(odd - 8.0 / 3.0) < 1e-15;
    return {oracle_ok && gap_even <= 1e-10 && gap_odd <= 1e-10 &&
                rep.verdict == Verdict::CertifiedDiverged,
            "even -> " + num(even) + " (gap " + num(gap_even) + "), odd -> " + num(odd) + " (gap " +
                num(gap_odd) + "), verdict " + to_string(rep.verdict)};
}

Result nilpotent_limit() {
    const ComplexMatrix c{{0, 2}, {0, 0}};
    const ComplexMatrix b{{1, 1}};
    double builtin_min = 1e300;
    for (NormTag tag : kBuiltinNorms) builtin_min = std::min(builtin_min, norm_value(c, builtin_norm(tag)));
    const auto rep = corollary1_analyze(SequencePresentation::finite({BlockUpperTriangular(b, c)}), c);
    if (!rep.certificate || !rep.limit) return {false, "no certificate or limit"};
    const double rate_err = std::abs(rep.certificate->rate() - 2.0 / std::sqrt(5.0));
    // C^2 = 0, so (I - C)^{-1} = I + C.
    const auto expected = oracle::triple_loop(oracle::to_grid(b),
                                              oracle::to_grid(ComplexMatrix::identity(2) + c));
    const double limit_err = fro_diff(rep.limit->block(0, 1, 1, 2), oracle::from_grid(expected));
    return {builtin_min >= 2.0 && rep.certificate->kind() == CertificateKind::Lyapunov &&
                rate_err <= 1e-10 && limit_err <= 1e-12 &&
                rep.verdict == Verdict::CertifiedConverged,
            "built-in norms >= " + num(builtin_min) + ", Lyapunov rate error " + num(rate_err) +
                ", limit error " + num(limit_err)};
}

Result rcp_sets() {
    const auto a1 = scalar_factor(1, 0.5), a2 = scalar_factor(1.5, 0.25), a3 = scalar_factor(2, 0.5);
    const ComplexMatrix common{{1, 2}, {0, 0}};
    std::size_t perms = 0;
    bool ok = true;

    auto each_permutation = [&](std::vector<BlockUpperTriangular> set, auto&& check) {
        std::vector<std::size_t> order(set.size());
        std::iota(order.begin(), order.end(), 0);
        do {
            std::vector<BlockUpperTriangular> p;
            for (auto i : order) p.push_back(set[i]);
            ok = check(certify_rcp(p), p) && ok;
            ++perms;
        } while (std::next_permutation(order.begin(), order.end()));
    };

    each_permutation({a1, a2}, [&](const RcpVerdict& v, const auto&) {
        return v.is_rcp && v.limit && fro_diff(*v.limit, common) <= 1e-12;
    });
    // L = b / (1 - c): 2 for a1 and a2, 4 for a3. Alternating a1 and a3
    // accumulates at 8/3 and 10/3.
    auto scalar = [](const BlockUpperTriangular& a, bool b) {
        return (b ? a.b() : a.c())(0, 0).real();
    };
    auto not_rcp = [&](const RcpVerdict& v, const std::vector<BlockUpperTriangular>& p) {
        if (v.is_rcp || !v.violating_pair || !v.witness) return false;
        const auto [i, j] = *v.violating_pair;
        for (std::size_t k = 0; k < p.size(); ++k)
            if (std::abs(v.candidates[k](0, 0).real() - scalar(p[k], true) / (1.0 - scalar(p[k], false))) >
                1e-14)
                return false;
        const double li = v.candidates[i](0, 0).real(), lj = v.candidates[j](0, 0).real();
        // Phase limits of the alternating product: fixed points of x -> b2 + (b1 + x c1) c2.
        auto phase = [&](const BlockUpperTriangular& first, const BlockUpperTriangular& second) {
            return (scalar(second, true) + scalar(first, true) * scalar(second, false)) /
                   (1.0 - scalar(first, false) * scalar(second, false));
        };
        std::vector<double> expected = {phase(p[i], p[j]), phase(p[j], p[i])};
        std::vector<double> pts;
        for (const auto& m : v.witness->points) pts.push_back(m(0, 0).real());
        std::sort(pts.begin(), pts.end());
        std::sort(expected.begin(), expected.end());
        const bool pair_ok = std::abs(std::abs(li - lj) - 2.0) < 1e-14 &&
                             std::abs(v.max_discrepancy - 2.0) < 1e-14;
        return pair_ok && pts.size() == 2 && std::abs(pts[0] - expected[0]) < 1e-12 &&
               std::abs(pts[1] - expected[1]) < 1e-12;
    };
    each_permutation({a1, a3}, not_rcp);
    {
        const BlockUpperTriangular pair[] = {a1, a3};
        const auto w = certify_rcp(pair).witness;
        std::vector<double> pts;
        if (w)
            for (const auto& m : w->points) pts.push_back(m(0, 0).real());
        std::sort(pts.begin(), pts.end());
        ok = ok && pts.size() == 2 && std::abs(pts[0] - 8.0 / 3.0) < 1e-12 &&
             std::abs(pts[1] - 10.0 / 3.0) < 1e-12;
    }
    each_permutation({a1, a2, a3}, not_rcp);
    return {ok, std::to_string(perms) + " permutations checked"};
}

Result left_products() {
    std::mt19937_64 rng(6006);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_excess = -1.0, worst_tail = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 2 + rng() % 7;
        const std::size_t s = 1 + rng() % (d - 1), tail = d - s;
        LeftProductState state = LeftProductState::initial(s, tail);
        ComplexMatrix z400 = state.z;
        for (std::size_t n = 1; n <= 600; ++n) {
            ComplexMatrix b = oracle::random_matrix(rng, s, tail);
            b = Complex(10.0 * u(rng) / oracle::inf_norm_oracle(b)) * b;
            const BlockUpperTriangular a(s, b, oracle::random_contraction(rng, tail, 0.9));
            const LeftProductState next = left_product_step(state, a);
            const double inc = oracle::inf_norm_oracle(next.z - state.z);
            worst_excess = std::max(worst_excess, inc - (10.0 * std::pow(0.9, double(n - 1)) + 1e-12));
            state = next;
            if (n == 400) z400 = state.z;
            if (n > 400) worst_tail = std::max(worst_tail, oracle::fro(state.z - z400));
        }
    }
    return {worst_excess <= 0.0 && worst_tail <= 1e-10,
            "200 sequences; max increment excess " + num(worst_excess) + ", max ||Z_m - Z_400|| " +
                num(worst_tail)};
}

struct GoldenCase {
    const char* golden;
    std::vector<std::string> args;
    int exit_code;
};

Result golden_fixtures() {
    const std::string fx = INFPROD_FIXTURE_DIR, gd = INFPROD_GOLDEN_DIR;
    const std::vector<GoldenCase> cases = {
        {"constant_product", {"product", "--input", fx + "/constant.json", "--n", "3"}, 0},
        {"constant_analyze", {"analyze", "--input", fx + "/constant.json"}, 0},
        {"nonrcp_pair_analyze", {"analyze", "--input", fx + "/nonrcp_pair_periodic.json"}, 0},
        {"nonrcp_pair_certify", {"certify-rcp", "--input", fx + "/nonrcp_pair_set.json"}, 1},
        {"rcp_pair_certify", {"certify-rcp", "--input", fx + "/rcp_pair_set.json"}, 0},
        {"nilpotent_norm", {"norm", "--input", fx + "/nilpotent_norm.json"}, 0},
        {"violation_analyze", {"analyze", "--input", fx + "/violation.json"}, 3},
        {"malformed_analyze", {"analyze", "--input", fx + "/malformed.json"}, 2},
    };
    std::string mismatches;
    for (const auto& c : cases) {
        std::ifstream in(gd + "/" + c.golden + ".out", std::ios::binary);
        if (!in) {
            mismatches += std::string(" ") + c.golden + "(missing)";
            continue;
        }
        const std::string expected((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        for (int rep = 0; rep < 2; ++rep) {
            std::vector<const char*> argv = {"infprod"};
            for (const auto& a : c.args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            if (code != c.exit_code || out.str() != expected) {
                mismatches += std::string(" ") + c.golden;
                break;
            }
        }
    }
    return {mismatches.empty(), std::to_string(cases.size()) + " cases" +
                                    (mismatches.empty() ? "" : ", mismatched:" + mismatches)};
}

}  // namespace

int main() {
    int failures = 0;
    auto guarded = [](auto&& fn) -> Result {
        try {
            return fn();
        } catch (const std::exception& e) {
            return {false, std::string("exception: ") + e.what()};
        }
    };
    report(1, "structured product matches dense product", guarded(oracle_equivalence), failures);
    report(2, "eventually constant sequences converge within the bound", guarded(eventually_constant),
           failures);
    report(3, "alternating non-RCP pair has two accumulation points", guarded(refutation), failures);
    report(4, "nilpotent C certified through a Lyapunov norm", guarded(nilpotent_limit), failures);
    report(5, "RCP certification and its witness, all orders", guarded(rcp_sets), failures);
    report(6, "left products converge geometrically", guarded(left_products), failures);
    report(7, "deviation identity residual on criteria 1-3",
           Result{g_max_residual <= 1e-10, "max residual " + num(g_max_residual)}, failures);
    report(8, "CLI golden outputs and exit codes", guarded(golden_fixtures), failures);
    return failures == 0 ? 0 : 1;
}
