/// @file io.hpp
/// @brief JSON schemas for covariances, interaction kernels, trees and
///        amplitude problems, plus bound-report serialization (JSON lines
///        and CSV). Schemas are versioned; exact field names are documented
///        in the README.

#pragma once

#include <memory>
#include <string>

#include "fermitree/amplitude.hpp"
#include "fermitree/bounds.hpp"

namespace fermitree {
namespace io {

inline constexpr int kSchemaVersion = 1;

/// {"torus_dims": [...], "spins": N, "table": [[s, s', p_1..p_D, re, im], ...]}
/// Unlisted entries are zero.
grassmann::Covariance load_covariance(const std::string& path);
void save_covariance(const grassmann::Covariance& c, const std::string& path);

/// {"torus_dims": [...], "spins": N, "arity": n,
///  "table": [[s_1..s_n, p_1_1..p_n_D, re, im], ...]}
grassmann::InteractionKernel load_kernel(const std::string& path);
void save_kernel(const grassmann::InteractionKernel& k, const std::string& path);

/// {"m": m, "edges": [[a, b], ...]} with the edge list sorted.
trees::Tree load_tree(const std::string& path);
void save_tree(const trees::Tree& t, const std::string& path);
std::string tree_id(const trees::Tree& t);

/// {"tree": {...}, "root": r, "n_per_vertex": [n_1..n_m],
///  "external_legs": [[p_1..p_D, s], ...],
///  "covariance_ref": path, "kernels_ref": {"<arity>": path, ...}}
/// Referenced paths are resolved relative to the problem file.
struct ProblemBundle {
    std::unique_ptr<grassmann::Covariance> covariance;
    std::map<int, grassmann::InteractionKernel> kernels;
    std::unique_ptr<amplitude::AmplitudeProblem> problem;
};

ProblemBundle load_problem(const std::string& path);

std::string bound_report_json(const bounds::BoundReport& row);
std::string bound_report_csv_header();
std::string bound_report_csv(const bounds::BoundReport& row);

/// Append JSON-lines rows to a file (creates it if missing).
void append_lines(const std::string& path, const std::vector<std::string>& lines);
void write_file(const std::string& path, const std::string& content);

}  // namespace io
}  // namespace fermitree
