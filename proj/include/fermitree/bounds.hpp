/// @file bounds.hpp
/// @brief Bound-formula evaluators, covariance norms, the single-scale Fermi
///        model, and power-counting fits.
///
/// Norm conventions: momentum sums carry the |T|^-1 weight, position sums do
/// not; sup norms run over all spin pairs; the gradient is the mixed forward
/// difference over every axis, scaled by the lattice steps, of the zero-
/// extended fundamental-window table (so compactly supported tables get no
/// wraparound term and a constant table differentiates to boundary spikes).

#pragma once

#include <map>
#include <optional>
#include <string>

#include "fermitree/grassmann.hpp"
#include "fermitree/trees.hpp"

namespace fermitree {
namespace bounds {

struct CovarianceNorms {
    double sup_hat = 0.0;   // |hat C|_inf
    double l1_hat = 0.0;    // int dlambda |hat C| over L* x Sigma
    double l1_pos = 0.0;    // max_{ss'} sum_x |C_{ss'}(x)|
    double grad_sup = 0.0;  // |D hat C|_inf, D = mixed forward difference / steps
    double grad_l1 = 0.0;   // int dlambda |D hat C|
};

CovarianceNorms covariance_norms(const grassmann::Covariance& c);

/// frak c = |hat C|_1 |D hat C|_inf + |D hat C|_1 |hat C|_inf.
double frak_c(const CovarianceNorms& n);

/// delta_{n = n(n,m)} (const |hat C|_inf)^(m-1) prod_l d^T(l)! 2^{n_l} |hat w_{n_l}|_inf.
/// The unspecified constant of the perturbative estimate is an explicit
/// caller parameter. Kernel sup norms are 1-based by vertex.
double perturbative_bound(const CovarianceNorms& norms, const trees::Tree& t,
                          const std::vector<int>& n_per_vertex,
                          const std::vector<double>& w_sup, double const_param = 1.0);

/// (n^(n/2)/n!) |C|_1^(m-1) prod_l d^T(l)! 2^{n_l} |w_{n_l}|_1 with
/// n = n(n,m) = sum n_l - 2(m-1) external legs (0^0 = 0! = 1).
double standard_bound(const CovarianceNorms& norms, const trees::Tree& t,
                      const std::vector<int>& n_per_vertex, const std::vector<double>& w_l1);

/// |T| (n^n/n!) |hat C|_inf^(m-1) |hat C|_1^n
///   prod_l d^T(l)! 2^{n_l} ([d^T(l)-1] v 1)^n |Sigma|^{n_l} |hat w_{n_l}|_inf,
/// n = sum n_l / 2 - (m-1) loop lines. Throws unless n is a nonnegative integer.
double theorem1_bound(const CovarianceNorms& norms, const trees::Tree& t,
                      const std::vector<int>& n_per_vertex, const std::vector<double>& w_sup,
                      int sigma_count, double volume);

/// The caterpillar-tree bound with |hat C|_inf frak_c^m in place of the
/// |hat C|_inf^(m-1) chain; vertices 1..m+2 supply sup norms, the pendant
/// leaves m+3..2m+2 supply position l1 norms. n = sum n_l/2 - (2m+1).
double theorem2_bound(const CovarianceNorms& norms, int m, const std::vector<int>& n_per_vertex,
                      const std::vector<double>& w_sup_spine,
                      const std::vector<double>& w_l1_leaves, int sigma_count, double volume);

/// |T| ((2n)!/(2^n n!)) |hat C|_1^n |hat A_{2n}|_inf.
double loop_bound(const CovarianceNorms& norms, double a_sup, int n_loops, double volume);

struct CorollaryNorms {
    std::vector<std::pair<int, double>> per_n;  // (n, |w_n|)
    double total = 0.0;                         // |W| = sum_n |w_n|
    bool summable = false;                      // |W| < 1
};

/// |w_n| = |hat C|_inf |hat C|_1^(n/2-1) 8 e^-1 (4 e^(b+1/2))^n |hat w_n|_inf
/// for each supplied even n >= 2, and the geometric-sum output bound.
CorollaryNorms corollary_effective_norm(const CovarianceNorms& norms,
                                        const std::map<int, double>& w_sup_by_arity, int b);

/// 8 (4 e^b)^k |W| / (1 - |W|); throws when |W| >= 1 (flagged in the struct).
double corollary_output_bound(const CorollaryNorms& n, int b, int k);

/// Single-scale Fermi propagator hat C(p0, p) = chi_j(p0,p) / (i p0 - p^2 + 1)
/// on a (d+1)-dimensional momentum lattice, with chi_j = phi(M^2j ((p0)^2 +
/// (p^2-1)^2)) and phi a fixed smooth bump supported in [1/2, 2], equal to 1
/// on [3/4, 7/4]. The particle/hole index is the spin set {0, 1}.
struct ScaleModel {
    double M = 2.0;
    int j = 1;
    int d = 1;
    int points_per_axis = 256;
};

/// The frozen C_c^inf bump phi(u) = s((2-u)/eps) s((u-1/2)/eps), eps = 1/4,
/// s(t) = f(t)/(f(t)+f(1-t)), f(t) = exp(-1/t) for t > 0.
double bump_phi(double u);

/// Tabulates the model covariance. Throws for j <= 0 or when the cutoff
/// support does not fit strictly inside the fundamental momentum domain.
grassmann::Covariance build_single_scale(const ScaleModel& model);

/// Minimum points per axis for the shell at scale j to be resolved.
int required_resolution(double M, int j);

/// Spinless scale-covariant indicator family: hat C = +-M^j on two mirrored
/// blocks of exactly L * M^-2j points, so sup and l1 slopes are exact.
grassmann::Covariance synthetic_scale_covariance(int sites, double M, int j);

struct Slope {
    double value = 0.0;
    double stderr = 0.0;
};

/// Least-squares slope of log_M(values) against j. Throws for fewer than
/// 3 scales or nonpositive data.
Slope fit_log_slope(const std::vector<int>& j, const std::vector<double>& values, double M);

struct PowerCountingReport {
    Slope sup_hat, l1_hat, l1_pos, frak_c_slope;
};

PowerCountingReport power_counting_fit(const std::vector<int>& j,
                                       const std::vector<CovarianceNorms>& norms, double M);

/// One row of a bound table; serialized by the io module. Bound values that
/// do not apply stay unset; `amplitude` is set when the desk computation is
/// feasible, otherwise the row is bound-only.
struct BoundReport {
    std::string tree_id;  // sorted edge list, e.g. "1-2,2-3"
    std::vector<int> n_per_vertex;
    int external_legs = 0;
    int branch_excess = 0;
    double perturbative = 0.0;
    double standard = 0.0;
    double theorem1 = 0.0;
    std::optional<double> theorem2;
    std::optional<double> loop;
    std::optional<double> amplitude_abs;
    bool bound_only = true;
    bool domination_ok = true;
    double alpha_coupling = 0.0;  // corollary smallness parameter when used
    int b_branches = 0;
};

}  // namespace bounds
}  // namespace fermitree
