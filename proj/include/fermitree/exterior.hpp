/// @file exterior.hpp
/// @brief Sparse exterior algebra over a finite index set: forms, wedge
///        products, lp norms, the top-degree functional and shuffle bounds.

#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace fermitree {

using Complex = std::complex<double>;

// Coefficients with modulus below this are dropped after arithmetic passes.
inline constexpr double kPruneThreshold = 1e-14;

namespace exterior {

/// One leg slot (vertex, slot) of the index set I = {(1,1),...,(m,n_m-d(m))}.
/// Total order is lexicographic in (vertex, slot).
struct LegIndex {
    int vertex = 0;  // 1-based
    int slot = 0;    // 1-based
    friend auto operator<=>(const LegIndex&, const LegIndex&) = default;
};

/// Element of G = (+)_n (C^I)^(^n), stored sparsely.
///
/// A basis monomial e_{i1} ^ ... ^ e_{ik} with i1 < ... < ik is keyed by the
/// bitmask with those flattened indices set. No zero coefficients are stored
/// (pruned below kPruneThreshold), and terms are kept sorted by mask so all
/// operations are deterministic.
class Form {
public:
    using Mask = std::uint64_t;
    struct Term {
        Mask mask;
        Complex coeff;
    };

    Form() = default;
    explicit Form(int universe) : universe_(universe) {}

    /// A single scaled basis monomial.
    static Form monomial(int universe, Mask mask, Complex coeff);
    /// The scalar c (degree-0 part only).
    static Form scalar(int universe, Complex c);
    /// A one-form from dense coefficients, size == universe.
    static Form one_form(const std::vector<Complex>& coeffs);

    int universe() const { return universe_; }
    bool empty() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    /// Coefficient of a basis mask (0 if absent).
    Complex coeff(Mask mask) const;

    /// Degree of the highest nonzero term, -1 if zero.
    int degree() const;

    /// True if every term has the given degree.
    bool homogeneous(int k) const;

    Form& operator+=(const Form& other);
    Form& operator*=(Complex c);
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator*(Complex c, Form a) { return a *= c; }

    /// Accumulate a single term; call compact() when done with a batch.
    void accumulate(Mask mask, Complex coeff) { staged_.push_back({mask, coeff}); }
    void compact();

    void prune(double threshold = kPruneThreshold);

    /// Max |difference| of coefficients against another form.
    double distance(const Form& other) const;

private:
    int universe_ = 0;
    std::vector<Term> terms_;   // sorted by mask, no zeros
    std::vector<Term> staged_;  // pending accumulations
};

/// Sign of moving the bits of `incoming` past the bits of `present`,
/// i.e. the parity of crossings when e_incoming is wedged from the right
/// onto the (sorted) monomial e_present. Masks must be disjoint.
int wedge_sign(Form::Mask present, Form::Mask incoming);

/// Signed shuffle-sum wedge product. Throws on universe mismatch.
Form wedge(const Form& a, const Form& b);

/// lp norm of the coefficient vector, p in [1, inf]. Throws for p < 1.
double lp_norm(const Form& a, double p);

/// Coefficient of the full top-degree monomial e_1 ^ ... ^ e_universe;
/// zero on anything of lower degree.
Complex top_integral(const Form& a);

/// l2 adjoint of wedge-by-v for a one-form v. Throws if v is not degree 1.
/// Satisfies {wedge_v, interior_v} = |v|_2^2 * id.
Form interior_product(const Form& v, const Form& a);

/// Shuffle submultiplicativity constant multinomial(k; k_1..k_n)^((p-1)/p)
/// with k = sum k_i. Throws on an empty list or p < 1.
double shuffle_bound(const std::vector<int>& degrees, double p);

}  // namespace exterior
}  // namespace fermitree
