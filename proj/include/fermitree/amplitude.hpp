/// @file amplitude.hpp
/// @brief The exterior-algebra recursion for tree-expansion amplitude
///        kernels, its brute-force oracles, Fourier rank-1 decompositions,
///        the discrete integration-by-parts identity, and numeric tree
///        amplitude values.
///
/// Ordering conventions, fixed once so that the recursion, the direct
/// oracle and the antisymmetrization identity agree sign-exactly:
///   * every line {l, Pi(l)} is oriented towards the root;
///   * in each kernel argument list the parent line comes first, then the
///     child lines with children in increasing vertex label, then the
///     vertex's own legs in increasing slot;
///   * wedge products follow the same traversal (children first, then own
///     legs), so the top monomial appears in "traversal order". The direct
///     kernel oracle absorbs the sign of the permutation between slot order
///     (1,1) < (1,2) < ... and traversal order, which makes the assembled
///     kernel independent of the choice of root.

#pragma once

#include <functional>
#include <optional>
#include <span>

#include "fermitree/exterior.hpp"
#include "fermitree/grassmann.hpp"
#include "fermitree/trees.hpp"

namespace fermitree {
namespace amplitude {

using exterior::Form;

/// Flattened enumeration of the leg index set I = {(1,1),...,(m,n_m-d(m))}
/// in lexicographic (vertex, slot) order, plus the recursion's traversal
/// order and the sign relating the two.
struct LegLayout {
    std::vector<std::pair<int, int>> slots;  // flat -> (vertex, slot), both 1-based
    std::vector<int> first;                  // first[l] = flat index of (l,1)
    std::vector<int> count;                  // count[l] = n_l - d^T(l)
    std::vector<int> traversal;              // flat indices in recursion wedge order
    int traversal_sign = 1;                  // sgn(slot order -> traversal order)

    int total() const { return static_cast<int>(slots.size()); }
};

LegLayout make_leg_layout(const trees::RootedTree& rt, const std::vector<int>& n_per_vertex);

/// External leg datum lambda = (p, sigma), momentum as a flat T* index.
struct Leg {
    int p_flat = 0;
    int sigma = 0;
};

/// One fixed (tree, legs-per-vertex, external data) amplitude instance.
struct AmplitudeProblem {
    trees::RootedTree rt;
    std::vector<int> n_per_vertex;  // 1-based, [0] unused
    const grassmann::Covariance* covariance = nullptr;
    std::vector<const grassmann::InteractionKernel*> kernels;  // 1-based by vertex
    std::vector<Leg> external;                                 // by flat slot index
    LegLayout layout;

    /// subtree_slots[l] = flat slots below the line {l, Pi(l)}, by vertex.
    std::vector<std::vector<int>> subtree_slots;

    AmplitudeProblem(trees::RootedTree rt_, std::vector<int> n_per_vertex_,
                     const grassmann::Covariance* cov,
                     std::vector<const grassmann::InteractionKernel*> kernels_,
                     std::vector<Leg> external_);

    int spins() const { return covariance->spins(); }
    const Lattice& torus() const { return covariance->torus(); }

    /// Sum of external momenta over the set bits of a basis mask, mod lattice.
    int mask_momentum(Form::Mask mask) const;

    /// True iff the external momenta sum to zero mod the lattice.
    bool momentum_conserving() const;
};

/// Line spins (sigma_l, sigma_l') per non-root vertex l (the line {l,Pi(l)}),
/// and doubled leg spins sigma'_iota per flat slot.
struct SpinAssignment {
    std::vector<std::pair<int, int>> line;  // 1-based by lower vertex; root entry unused
    std::vector<int> slot;                  // by flat slot index
};

/// Iterate all |Sigma|^(2(m-1)+n) spin assignments in a fixed order.
void for_each_spin_assignment(const AmplitudeProblem& p,
                              const std::function<void(const SpinAssignment&)>& fn);

/// Optional interpolation data for the fundamental forms (the s^T = a*a
/// Remark): slot iota at position 2i-1 resp. 2i of I uses conj(a) resp. a
/// at row k_i, column = vertex of the target slot.
struct Interpolation {
    Eigen::MatrixXd a;       // m x m, symmetric PSD, unit row norms
    std::vector<int> k;      // size n/2, entries in 1..m
};

/// alpha_iota(sigma) = sum over slots iota' with matching assigned spin of
/// e_iota', or the a-weighted variant when interpolation data is given.
Form fundamental_form(const AmplitudeProblem& p, const SpinAssignment& sa, int slot,
                      const Interpolation* interp = nullptr);

/// Multiplies each basis term of a by hat C_{sigma_l sigma_l'}(sum of leg
/// momenta in the term), for the line {l, Pi(l)}.
Form apply_c(const AmplitudeProblem& p, const SpinAssignment& sa, int vertex, const Form& a);

/// The multilinear vertex map W_l: wedges child forms (children increasing)
/// and leg forms (slots increasing) and weights every cross term with
/// hat w_{n_l} evaluated at (minus the total momentum, child line sums, leg
/// momenta) in the frozen argument order. Throws on arity mismatch.
Form apply_w(const AmplitudeProblem& p, const SpinAssignment& sa, int vertex,
             std::span<const Form> child_forms, std::span<const Form> leg_forms);

/// Leaf-to-root evaluation of alpha'(r; n; lambda; sigma); the root line
/// operator is the identity.
Form recurse_alpha(const AmplitudeProblem& p, const SpinAssignment& sa,
                   const Interpolation* interp = nullptr);

/// Ground truth for recurse_alpha: the restricted sum over index assignments
/// iota with covariance and kernel factors evaluated at assigned momenta.
Form oracle_direct_alpha(const AmplitudeProblem& p, const SpinAssignment& sa,
                         const Interpolation* interp = nullptr);

/// hat A'_n(T; n; lambda): line-spin sums of the product of hat C over lines
/// and hat w over vertices at the unique momentum-conservation solution,
/// times the n_l!/(n_l-d)! prefactors, the total-momentum delta, and the
/// traversal reordering sign. `lambda` overrides the problem's external legs.
Complex oracle_direct_kernel(const AmplitudeProblem& p, std::span<const Leg> lambda);

/// hat A_n(T; n; lambda) = (1/n!) int alpha via the recursion, with the
/// delta and combinatorial prefactors included. The spin sums are carried
/// out per vertex (they factor along the tree), which is algebraically
/// identical to enumerating assignments of recurse_alpha.
Complex kernel_hat_A(const AmplitudeProblem& p);

/// (1/n!) sum_pi sgn(pi) oracle_direct_kernel(pi lambda): the permutation
/// antisymmetrization oracle for kernel_hat_A.
Complex kernel_antisymmetrization_oracle(const AmplitudeProblem& p);

/// int A(T; n; psi) dmu_C by pairing loop legs (lambda, -lambda) against
/// loop covariances with the (2n)!/(2^n n!) combinatorics. Requires an even
/// number of external legs (odd counts integrate to zero).
Complex tree_amplitude_value(const AmplitudeProblem& p);

/// The same value by assembling the position-space psi polynomial of the
/// tree term and handing it to the Grassmann Gaussian integral.
Complex tree_amplitude_grassmann(const AmplitudeProblem& p);

/// A superposition of weighted rank-1 wedges (all factors one-forms).
struct RankOneSuperposition {
    struct Term {
        Complex weight;
        std::vector<Form> factors;
    };
    std::vector<Term> terms;
    int universe = 0;

    Form sum() const;
    /// sum_terms |weight| prod_j |factor_j|_2
    double l1_rank1_norm() const;
};

/// Position-space decomposition of C_l applied to a rank-1 wedge:
/// sum_x C_{ss'}(x) E(x)[v_1] ^ ... ^ E(x)[v_k] with E(x)[e_i] = e^{i x p_i} e_i.
/// Throws if any factor is not a one-form.
RankOneSuperposition fourier_decompose_c(const AmplitudeProblem& p, const SpinAssignment& sa,
                                         int vertex, std::span<const Form> rank1_factors);

/// Position-space decomposition of W_l on rank-1 inputs (children given as
/// factor lists, legs as one-forms), per the phase-operator identity.
RankOneSuperposition fourier_decompose_w(const AmplitudeProblem& p, const SpinAssignment& sa,
                                         int vertex,
                                         std::span<const std::vector<Form>> child_factors,
                                         std::span<const Form> leg_forms);

/// Discrete integration by parts for a pair of line operators on a 1-D
/// momentum line. The propagator window covers the fundamental domain
/// [t_min, t_min + size); lookups outside are zero and the support must not
/// touch the window boundary (no wraparound).
struct IbpResult {
    Form lhs;                  // C_l[a] ^ C_l'[a']
    Form rhs;                  // the two summation-by-parts terms
    double identity_residual;  // max coefficient difference
    double lhs_l2;
    double bound;              // c * |a|_2 |a'|_2 with the discrete norms
};

IbpResult ibp_apply(std::span<const Complex> c_window, int t_min,
                    std::span<const int> leg_momenta, const Form& a_rank1,
                    const Form& a_prime);

}  // namespace amplitude
}  // namespace fermitree
