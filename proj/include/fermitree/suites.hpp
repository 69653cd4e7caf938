/// @file suites.hpp
/// @brief Batch verification suites, bound tables and scaling runs shared by
///        the CLI and the acceptance tests. Reports are deterministic given
///        (config, seed): instances are indexed, generators are split per
///        index, and output rows are ordered by index regardless of the
///        thread count.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fermitree/bounds.hpp"

namespace fermitree {
namespace suites {

struct RunConfig {
    std::vector<std::string> suites;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    int lattice = 8;        // 1-D desk lattice length
    int m_max = 4;          // max tree size in sweeps
    int n_max = 4;          // max legs per vertex
    int configs = 20;       // momentum configurations per instance
    int branches = -1;      // corollary b (negative: not filtered)
    bool caterpillar = false;
    double M = 2.0;
    int j_min = 2;
    int j_max = 5;
    int d = 1;
    int scaling_points = 1024;
    int synthetic_points = 4096;
    int threads = 1;
};

struct CaseRow {
    std::string suite;
    std::uint64_t index = 0;
    bool pass = false;
    double error = 0.0;
    double tolerance = 0.0;
    std::string detail;  // replay data as a JSON object
};

struct SuiteReport {
    std::string suite;
    std::vector<CaseRow> rows;

    int failures() const;
    std::string jsonl() const;
    std::string csv() const;
};

/// Suites: "pfaffian", "recursion", "free-energy", "gram", "ibp", "submult".
/// Throws std::invalid_argument for an unknown name.
SuiteReport run_suite(const std::string& name, const RunConfig& config);

SuiteReport run_pfaffian(const RunConfig& config);
SuiteReport run_recursion(const RunConfig& config);
SuiteReport run_free_energy(const RunConfig& config);
SuiteReport run_gram(const RunConfig& config);
SuiteReport run_ibp(const RunConfig& config);
SuiteReport run_submult(const RunConfig& config);

/// Bound table over the (T, n) classes of the recursion sweep with desk
/// amplitudes (criterion 5 scope): theorem 1 and the loop bound against
/// |A(T;n)| everywhere, theorem 2 on the m=1 caterpillar.
std::vector<bounds::BoundReport> run_bound_table(const RunConfig& config);

/// Truncated corollary check: weighted norm of the k-point tree sum over
/// T_{m,b}, m <= 3, against the geometric-sum bound.
struct CorollaryCheck {
    int k = 0;
    int b = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double coupling = 0.0;
    bool pass = false;
};
std::vector<CorollaryCheck> run_corollary_check(const RunConfig& config);

struct ScalingReport {
    std::vector<int> j;
    std::vector<bounds::CovarianceNorms> norms;
    bounds::PowerCountingReport fit;
    bounds::Slope synthetic_sup, synthetic_l1;
    std::string csv() const;
};

/// Single-scale model norms over the j range plus the synthetic family.
/// Throws if the j range is shorter than 3 or the resolution is inadequate
/// (the message names the required lattice size).
ScalingReport run_scaling(const RunConfig& config);

/// FERMITREE_THREADS, else the hardware concurrency.
int default_threads();

}  // namespace suites
}  // namespace fermitree
