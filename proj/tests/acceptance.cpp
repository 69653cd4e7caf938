// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <cmath>
#include <cstdio>
#include <string>

#include "fermitree/suites.hpp"
#include "fermitree/trees.hpp"

using namespace fermitree;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string suite_detail(const suites::SuiteReport& rep) {
    double max_err = 0.0;
    for (const auto& r : rep.rows) max_err = std::max(max_err, r.error);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu cases, %d failed, max err %.2e", rep.rows.size(),
                  rep.failures(), max_err);
    return buf;
}

}  // namespace

int main() {
    suites::RunConfig config;
    config.seed = 20240501;
    config.threads = suites::default_threads();
    const int n_threads = std::max(config.threads, 2);

    // 1. recursion correctness: m <= 4, n_l in {2,3,4}, n(n,m) <= 6,
    //    |Sigma| <= 2, 20 seeded momentum configurations on a 1-D L=8 lattice
    config.threads = n_threads;
    auto recursion_n = suites::run_recursion(config);
    report(1, "recursion correctness", recursion_n.failures() == 0, suite_detail(recursion_n));

    // 2. free-energy consistency at orders 1..3
    auto fe = suites::run_free_energy(config);
    report(2, "free-energy consistency", fe.failures() == 0, suite_detail(fe));

    // 3. Pfaffian identities
    auto pf = suites::run_pfaffian(config);
    report(3, "pfaffian identities", pf.failures() == 0, suite_detail(pf));

    // 4. Gram-Hadamard corollary
    auto gram = suites::run_gram(config);
    report(4, "gram-hadamard corollary", gram.failures() == 0, suite_detail(gram));

    // 5. bound domination (theorems 1 and 2, loop bound, corollary)
    {
        auto table = suites::run_bound_table(config);
        int violations = 0;
        for (const auto& row : table) violations += !row.domination_ok;
        auto corollary = suites::run_corollary_check(config);
        for (const auto& c : corollary) violations += !c.pass;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%zu bound rows + %zu corollary checks, %d violations",
                      table.size(), corollary.size(), violations);
        report(5, "bound domination", violations == 0, buf);
    }

    // 6. submultiplicativity, rank-1 contraction, CCR
    auto sub = suites::run_submult(config);
    report(6, "submultiplicativity and CCR", sub.failures() == 0, suite_detail(sub));

    // 7. discrete integration by parts
    auto ibp = suites::run_ibp(config);
    report(7, "integration by parts identity", ibp.failures() == 0, suite_detail(ibp));

    // 8. power counting
    {
        bool pass = true;
        std::string detail;
        try {
            auto scaling = suites::run_scaling(config);
            bool sup_ok = std::abs(scaling.fit.sup_hat.value - 1.0) <= 0.2;
            bool l1_ok = std::abs(scaling.fit.l1_hat.value + 1.0) <= 0.2;
            bool fc_ok = std::abs(scaling.fit.frak_c_slope.value - 2.0) <= 0.4;
            bool syn_ok = std::abs(scaling.synthetic_sup.value - 1.0) <= 1e-9 &&
                          std::abs(scaling.synthetic_l1.value + 1.0) <= 1e-9;
            pass = sup_ok && l1_ok && fc_ok && syn_ok;
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "slopes sup %.3f l1 %.3f frak_c %.3f; synthetic %.3f/%.3f",
                          scaling.fit.sup_hat.value, scaling.fit.l1_hat.value,
                          scaling.fit.frak_c_slope.value, scaling.synthetic_sup.value,
                          scaling.synthetic_l1.value);
            detail = buf;
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
        report(8, "power counting", pass, detail);
    }

    // 9. combinatorics, exact
    {
        bool pass = true;
        for (int m = 2; m <= 8; ++m) {
            unsigned long long cayley = 1;
            for (int i = 0; i < m - 2; ++i) cayley *= m;
            pass = pass && trees::enumerate_trees(m).size() == cayley;
        }
        for (int m = 2; m <= 7; ++m) {
            unsigned long long sum = 0;
            for (const auto& t : trees::enumerate_trees(m)) {
                unsigned long long prod = 1;
                for (int v = 1; v <= m; ++v)
                    for (int i = 2; i <= t.degree(v); ++i) prod *= i;
                sum += prod;
            }
            unsigned long long bound = 1;
            for (int i = 2; i <= m; ++i) bound *= i;
            for (int i = 0; i < m; ++i) bound *= 8;
            pass = pass && sum <= bound;
        }
        int paths = 0;
        for (const auto& t : trees::enumerate_trees(4)) paths += trees::branch_excess(t) == 0;
        pass = pass && paths == 12;
        report(9, "tree combinatorics", pass, "m^(m-2), sum prod d! <= m! 8^m, 12 paths on m=4");
    }

    // 10. determinism: the criterion-1 sweep is byte-identical at 1 and N threads
    {
        config.threads = 1;
        auto recursion_1 = suites::run_recursion(config);
        bool identical = recursion_1.jsonl() == recursion_n.jsonl();
        char buf[96];
        std::snprintf(buf, sizeof(buf), "1 thread vs %d threads, %zu rows", n_threads,
                      recursion_1.rows.size());
        report(10, "deterministic reports", identical && recursion_1.failures() == 0, buf);
    }

    return failures;
}
