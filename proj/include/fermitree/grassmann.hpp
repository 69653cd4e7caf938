/// @file grassmann.hpp
/// @brief Exact finite Grassmann algebra: Pfaffians, Gaussian integrals,
///        antisymmetrization, lattice Fourier transforms, covariances,
///        interaction kernels, a direct free-energy oracle and the
///        interpolated tree expansion it validates.
///
/// Conventions (fixed once, used everywhere):
///   hat g(p)  = sum_x g(x) exp(+i p.x)          (position -> momentum)
///   g(x)      = |T|^-1 sum_p hat g(p) exp(-i p.x)
///   int dp    = |T|^-1 sum_p                     (weighted momentum sums)
/// so that C(xi,xi') = int dp hat C_{ss'}(p) e^{ip(x-x')} with
/// C_{ss'}(u) = C((0,s),(u,s')).

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <span>

#include "fermitree/exterior.hpp"
#include "fermitree/lattice.hpp"
#include "fermitree/trees.hpp"

namespace fermitree {
namespace grassmann {

/// Generators psi(xi), xi = (x, sigma) in L = T x Sigma; generator index
/// g = flatten(x) * spins + sigma in canonical order.
struct GeneratorSet {
    Lattice torus;
    int spins = 1;

    long long count() const { return torus.sites() * spins; }
    int index(int x_flat, int sigma) const { return x_flat * spins + sigma; }
    int site(int g) const { return g / spins; }
    int spin(int g) const { return g % spins; }
};

/// Exact element of the Grassmann algebra over up to 64 generators. The
/// sparse mask/coefficient machinery is shared with exterior::Form; the
/// canonical generator order fixes all product signs.
using GrassmannPoly = exterior::Form;

/// Associative product with canonical-order signs. Throws on mismatched
/// generator counts.
GrassmannPoly grassmann_product(const GrassmannPoly& a, const GrassmannPoly& b);

/// Left derivative d/d psi_g.
GrassmannPoly derivative(const GrassmannPoly& p, int g);

enum class PfaffianMethod { matching_oracle, elimination };

/// Pfaffian of a skew-symmetric complex matrix. Throws if the input is not
/// skew (tolerance 1e-12 relative to the largest entry) or if the matching
/// oracle is requested above dimension 10. Odd dimension gives 0; the empty
/// matrix gives 1.
Complex pfaffian(const Eigen::MatrixXcd& a,
                 PfaffianMethod method = PfaffianMethod::elimination);

/// Grassmann Gaussian integral with covariance matrix c over the generator
/// set: monomials map to Pfaffians of the corresponding submatrix, the
/// degree-0 coefficient passes through.
Complex gaussian_integral(const GrassmannPoly& p, const Eigen::MatrixXcd& c);

/// Dense n-argument kernel over an abstract point space {0..points-1}.
struct DenseKernel {
    int arity = 0;
    int points = 0;
    std::vector<Complex> values;  // index = ((a_1*points + a_2)*points + ...)

    DenseKernel() = default;
    DenseKernel(int arity_, int points_)
        : arity(arity_), points(points_),
          values(static_cast<std::size_t>(std::pow(double(points_), arity_)), Complex{}) {}

    std::size_t offset(std::span<const int> args) const {
        std::size_t idx = 0;
        for (int a : args) idx = idx * points + a;
        return idx;
    }
    Complex value(std::span<const int> args) const { return values[offset(args)]; }
    Complex& at(std::span<const int> args) { return values[offset(args)]; }
};

/// (1/n!) sum_pi sgn(pi) f(args.pi); idempotent on antisymmetric input.
/// Throws for arity > 8.
DenseKernel antisymmetrize(const DenseKernel& f);

double sup_norm(const DenseKernel& f);

/// Translation-invariant antisymmetric covariance, stored as the momentum
/// table hat C_{ss'}(p) with the derived position kernel C_{ss'}(x).
class Covariance {
public:
    /// table layout: ((sigma*spins + sigma')*sites + p_flat)
    static Covariance from_hat(Lattice torus, int spins, std::vector<Complex> hat);
    static Covariance from_position(Lattice torus, int spins, std::vector<Complex> pos);

    const Lattice& torus() const { return torus_; }
    int spins() const { return spins_; }

    Complex hat(int sigma, int sigma2, int p_flat) const {
        return hat_[(static_cast<std::size_t>(sigma) * spins_ + sigma2) * sites_ + p_flat];
    }
    Complex position(int sigma, int sigma2, int x_flat) const {
        return pos_[(static_cast<std::size_t>(sigma) * spins_ + sigma2) * sites_ + x_flat];
    }

    /// C(xi, xi') = C_{ss'}(x' - x) over the generator set, for Gaussian
    /// integration of explicit polynomials.
    Eigen::MatrixXcd position_matrix() const;

    const std::vector<Complex>& hat_table() const { return hat_; }
    const std::vector<Complex>& position_table() const { return pos_; }

private:
    Lattice torus_;
    int spins_ = 1;
    std::size_t sites_ = 0;
    std::vector<Complex> hat_, pos_;

    void validate_antisymmetry() const;
};

/// Antisymmetric n-point kernel hat w_n over momentum-spin points
/// lambda = (p, sigma), point index = p_flat * spins + sigma. Entries off the
/// momentum conservation shell sum p = 0 are kept but never enter amplitudes.
class InteractionKernel {
public:
    InteractionKernel(Lattice torus, int spins, DenseKernel hat);

    const Lattice& torus() const { return torus_; }
    int spins() const { return spins_; }
    int arity() const { return hat_.arity; }

    int point(int p_flat, int sigma) const { return p_flat * spins_ + sigma; }
    Complex value(std::span<const int> points) const { return hat_.value(points); }
    const DenseKernel& hat() const { return hat_; }

    /// sup over all momentum-spin argument tuples.
    double sup_hat() const { return sup_norm(hat_); }

    /// Position kernel in the DFT gauge w(x_1 s_1,..) = |T|^-n sum_p hat w e^{-i sum p.x},
    /// and its full l1 norm sum over all position-spin arguments.
    DenseKernel position_kernel() const;
    double l1_position() const;

private:
    Lattice torus_;
    int spins_ = 1;
    DenseKernel hat_;
};

/// The quartic interaction of a density-density two-body potential v on T,
/// with the particle/hole index folded into the spin set: full spin order is
/// (s, kappa) -> sigma = s*2 + kappa, kappa = 1 creation, 0 annihilation.
/// Throws unless v is real and even.
InteractionKernel build_interaction(const Lattice& torus, int phys_spins,
                                    const std::vector<double>& v);

/// Kernel-table Fourier transforms with the fixed conventions; `slotwise`
/// transforms every argument of an arity-n table at once.
std::vector<Complex> hat_from_position(const Lattice& torus, std::span<const Complex> pos);
std::vector<Complex> position_from_hat(const Lattice& torus, std::span<const Complex> hat);
DenseKernel hat_from_position_slotwise(const Lattice& torus, int spins, const DenseKernel& pos);
DenseKernel position_from_hat_slotwise(const Lattice& torus, int spins, const DenseKernel& hat);

/// Coefficients (orders 1..order) of Omega(g W) = log int exp(g W) dmu_C as
/// a formal power series in g, via exact Grassmann exponentiation and the
/// formal logarithm. Throws if W has a degree-0 part, order > 4, or the
/// generator count exceeds the cap.
std::vector<Complex> free_energy_oracle(const GrassmannPoly& w, const Eigen::MatrixXcd& c,
                                        int order, int generator_cap = 14);

/// One term of the interpolated tree expansion:
///   int_0^1 prod_l ds_l  int Delta^T  /\_{l=1..m} W(psi^l)  dmu_{C (x) s^T},
/// evaluated exactly: the (m-1)! orderings of the s variables are enumerated
/// and each simplex is integrated with polynomial-exact Gauss-Legendre
/// quadrature. W lives on n_gen generators; the replicas use m*n_gen <= 64.
Complex bkar_tree_term(const GrassmannPoly& w, const Eigen::MatrixXcd& c,
                       const trees::Tree& tree);

/// Orders 1..m_max of the tree expansion sum_m (1/m!) sum_T bkar_tree_term.
std::vector<Complex> free_energy_tree_expansion(const GrassmannPoly& w,
                                                const Eigen::MatrixXcd& c, int m_max);

}  // namespace grassmann
}  // namespace fermitree
