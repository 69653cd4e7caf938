#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fermitree/grassmann.hpp"
#include "fermitree/random_inputs.hpp"

using namespace fermitree;
using namespace fermitree::grassmann;
using fermitree::testing::split_rng;

namespace {

GrassmannPoly psi(int n, int g) { return GrassmannPoly::monomial(n, GrassmannPoly::Mask{1} << g, 1.0); }

}  // namespace

TEST_CASE("pfaffian special values") {
    CHECK(pfaffian(Eigen::MatrixXcd::Zero(0, 0)) == Complex{1.0});

    Eigen::MatrixXcd two(2, 2);
    Complex c(0.7, -0.3);
    two << 0.0, c, -c, 0.0;
    CHECK(std::abs(pfaffian(two) - c) < 1e-14);

    // odd dimension is 0 by convention
    auto rng = split_rng(42, 0);
    auto odd = testing::random_skew_matrix(5, rng);
    CHECK(pfaffian(odd) == Complex{});

    Eigen::MatrixXcd notskew = Eigen::MatrixXcd::Ones(2, 2);
    CHECK_THROWS_AS(pfaffian(notskew), std::invalid_argument);
    CHECK_THROWS_AS(pfaffian(testing::random_skew_matrix(12, rng), PfaffianMethod::matching_oracle),
                    std::invalid_argument);
}

TEST_CASE("pfaffian 4x4 matches the perfect-matching formula") {
    auto rng = split_rng(7, 1);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = testing::random_skew_matrix(4, rng);
        Complex expect = a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
        CHECK(std::abs(pfaffian(a, PfaffianMethod::elimination) - expect) < 1e-13);
        CHECK(std::abs(pfaffian(a, PfaffianMethod::matching_oracle) - expect) < 1e-13);
    }
}

TEST_CASE("pfaffian squared is the determinant") {
    for (int trial = 0; trial < 100; ++trial) {
        auto rng = split_rng(99, trial);
        int n = 2 + static_cast<int>(rng() % 11);
        auto a = testing::random_skew_matrix(n, rng);
        Complex pf = pfaffian(a);
        Complex det = a.determinant();
        CHECK(std::abs(pf * pf - det) <= 1e-9 * std::max(1.0, std::abs(det)));
    }
}

TEST_CASE("pfaffian methods agree up to 8x8") {
    for (int trial = 0; trial < 50; ++trial) {
        auto rng = split_rng(123, trial);
        int n = 2 * (1 + static_cast<int>(rng() % 4));
        auto a = testing::random_skew_matrix(n, rng);
        CHECK(std::abs(pfaffian(a, PfaffianMethod::elimination) -
                       pfaffian(a, PfaffianMethod::matching_oracle)) < 1e-10);
    }
}

TEST_CASE("grassmann product") {
    const int n = 6;
    CHECK(grassmann_product(psi(n, 0), psi(n, 0)).empty());

    auto p12 = grassmann_product(psi(n, 0), psi(n, 1));
    auto p34 = grassmann_product(psi(n, 2), psi(n, 3));
    auto all = grassmann_product(p12, p34);
    CHECK(all.coeff(0b1111).real() == doctest::Approx(1.0));

    // even elements commute
    auto rng = split_rng(5, 5);
    auto a = testing::random_homogeneous_poly(n, 2, rng);
    auto b = testing::random_homogeneous_poly(n, 4, rng);
    CHECK(grassmann_product(a, b).distance(grassmann_product(b, a)) < 1e-13);

    CHECK_THROWS_AS(grassmann_product(psi(3, 0), psi(4, 0)), std::invalid_argument);
}

TEST_CASE("kernel-level product identity [ww']_n = sum Ant[w w']") {
    // degree-4 coefficient of W2 * W2' equals the antisymmetrized product of
    // the two coefficient kernels
    const int n = 5;
    auto rng = split_rng(31, 2);
    auto w = testing::random_homogeneous_poly(n, 2, rng);
    auto w2 = testing::random_homogeneous_poly(n, 2, rng);
    auto prod = grassmann_product(w, w2);

    // dense antisymmetric kernels from the monomial coefficients
    DenseKernel ka(2, n), kb(2, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            GrassmannPoly::Mask m = (GrassmannPoly::Mask{1} << i) | (GrassmannPoly::Mask{1} << j);
            double sign = i < j ? 1.0 : -1.0;
            std::array<int, 2> idx{i, j};
            // w_{n,o} = n! w_n: the ordered coefficient is split evenly
            ka.at(idx) = 0.5 * sign * w.coeff(m);
            kb.at(idx) = 0.5 * sign * w2.coeff(m);
        }
    DenseKernel raw(4, n);
    std::array<int, 4> idx;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    idx = {a, b, c, d};
                    std::array<int, 2> ab{a, b}, cd{c, d};
                    raw.at(idx) = ka.value(ab) * kb.value(cd);
                }
    auto anti = antisymmetrize(raw);
    // compare against the ordered coefficients of the product: w_{4,o} = 4! w_4
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                for (int d = c + 1; d < n; ++d) {
                    GrassmannPoly::Mask m = (GrassmannPoly::Mask{1} << a) |
                                            (GrassmannPoly::Mask{1} << b) |
                                            (GrassmannPoly::Mask{1} << c) |
                                            (GrassmannPoly::Mask{1} << d);
                    idx = {a, b, c, d};
                    CHECK(std::abs(24.0 * anti.value(idx) - prod.coeff(m)) < 1e-12);
                }
}

TEST_CASE("antisymmetrize") {
    auto rng = split_rng(17, 3);
    DenseKernel f(3, 4);
    for (auto& v : f.values) v = testing::random_unit(rng);
    auto anti = antisymmetrize(f);
    auto twice = antisymmetrize(anti);
    double d = 0.0;
    for (std::size_t i = 0; i < anti.values.size(); ++i)
        d = std::max(d, std::abs(anti.values[i] - twice.values[i]));
    CHECK(d < 1e-14);  // projection

    // symmetric input dies
    DenseKernel sym(2, 3);
    std::array<int, 2> ij;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            ij = {i, j};
            sym.at(ij) = double(i + j);
        }
    auto dead = antisymmetrize(sym);
    CHECK(sup_norm(dead) < 1e-14);

    // indicator of a single pair: +1/2 and -1/2
    DenseKernel ind(2, 3);
    ij = {0, 2};
    ind.at(ij) = 1.0;
    auto h = antisymmetrize(ind);
    CHECK(h.value(ij).real() == doctest::Approx(0.5));
    ij = {2, 0};
    CHECK(h.value(ij).real() == doctest::Approx(-0.5));

    CHECK_THROWS_AS(antisymmetrize(DenseKernel(9, 2)), std::invalid_argument);
}

TEST_CASE("gaussian integral") {
    const int n = 6;
    auto rng = split_rng(8, 4);
    auto c = testing::random_skew_matrix(n, rng);

    // two-point function
    auto m2 = grassmann_product(psi(n, 1), psi(n, 4));
    CHECK(std::abs(gaussian_integral(m2, c) - c(1, 4)) < 1e-14);

    // odd monomials vanish
    CHECK(gaussian_integral(psi(n, 2), c) == Complex{});

    // four-point matching sum
    auto m4 = grassmann_product(m2, grassmann_product(psi(n, 2), psi(n, 5)));
    // psi_1 psi_4 psi_2 psi_5 -> reorder to 1,2,4,5 with one transposition pair
    Complex expect = c(1, 2) * c(4, 5) - c(1, 4) * c(2, 5) + c(1, 5) * c(2, 4);
    // the monomial stored is e1^e2^e4^e5 with sign from sorting (1,4,2,5)
    CHECK(std::abs(gaussian_integral(m4, c) + expect) < 1e-13);

    // degree-0 passes through
    auto scalar = GrassmannPoly::scalar(n, {2.5, -1.0});
    CHECK(gaussian_integral(scalar, c) == Complex(2.5, -1.0));
}

TEST_CASE("covariance construction and fourier") {
    Lattice torus({4, 3});
    const int spins = 2;
    auto rng = split_rng(21, 9);
    auto cov = testing::random_covariance(torus, spins, rng);

    // antisymmetry of the position matrix
    auto cmat = cov.position_matrix();
    CHECK((cmat + cmat.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    // roundtrip position -> hat -> position
    auto back = Covariance::from_position(torus, spins, cov.position_table());
    double d = 0.0;
    for (std::size_t i = 0; i < back.hat_table().size(); ++i)
        d = std::max(d, std::abs(back.hat_table()[i] - cov.hat_table()[i]));
    CHECK(d < 1e-12);

    // delta kernel transforms to a constant
    std::vector<Complex> pos(torus.sites(), Complex{});
    pos[0] = 1.0;
    auto hat = hat_from_position(torus, pos);
    for (const auto& v : hat) CHECK(std::abs(v - Complex{1.0}) < 1e-13);
}

TEST_CASE("interaction kernel from a two-body potential") {
    Lattice torus({4});
    // zero potential -> zero kernel
    auto zero = build_interaction(torus, 1, std::vector<double>(4, 0.0));
    CHECK(zero.sup_hat() == 0.0);

    // odd potential rejected
    CHECK_THROWS_AS(build_interaction(torus, 1, {0.0, 1.0, 0.0, 0.5}),
                    std::invalid_argument);

    // random even potential: kernel is antisymmetric under transpositions
    auto rng = split_rng(77, 0);
    std::vector<double> v(4);
    v[0] = 0.3;
    v[1] = v[3] = -0.8;
    v[2] = 1.1;
    auto w = build_interaction(torus, 2, v);
    const auto& k = w.hat();
    std::array<int, 4> args{}, swapped{};
    for (int t = 0; t < 200; ++t) {
        for (auto& a : args) a = static_cast<int>(rng() % k.points);
        swapped = args;
        std::swap(swapped[1], swapped[2]);
        CHECK(std::abs(k.value(args) + k.value(swapped)) < 1e-12);
    }

    // delta potential between opposite physical spins: for identical
    // fermions the antisymmetrized contact term vanishes (Pauli), and for
    // distinct spins the kernel is the same for every conserved momentum
    // tuple with a fixed spin pattern
    std::vector<double> delta(4, 0.0);
    delta[0] = 1.0;
    auto wd1 = build_interaction(torus, 1, delta);
    CHECK(wd1.sup_hat() < 1e-14);

    auto wd = build_interaction(torus, 2, delta);
    // sigma = phys*2 + kappa: pattern (up kappa1, down kappa1, up kappa0, down kappa0)
    std::array<int, 4> b1{0 * 4 + 1, 1 * 4 + 3, 2 * 4 + 0, 1 * 4 + 2};
    std::array<int, 4> b2{1 * 4 + 1, 1 * 4 + 3, 3 * 4 + 0, 3 * 4 + 2};
    CHECK(std::abs(wd.value(b1)) > 1e-6);
    CHECK(std::abs(wd.value(b1) - wd.value(b2)) < 1e-13);
}

TEST_CASE("free energy oracle basics") {
    const int n = 8;
    auto rng = split_rng(55, 1);
    auto w = testing::random_homogeneous_poly(n, 4, rng, 0.25);

    // zero covariance: Omega = 0 at every order
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(n, n);
    auto omega0 = free_energy_oracle(w, zero, 3);
    for (auto v : omega0) CHECK(std::abs(v) < 1e-15);

    // order 1 is the Gaussian integral of W
    auto c = testing::random_skew_matrix(n, rng, 0.7);
    auto omega = free_energy_oracle(w, c, 3);
    CHECK(std::abs(omega[0] - gaussian_integral(w, c)) < 1e-13);

    // caps and degree-0 rejection
    CHECK_THROWS_AS(free_energy_oracle(w, c, 5), std::invalid_argument);
    auto bad = w;
    bad.accumulate(0, 1.0);
    bad.compact();
    CHECK_THROWS_AS(free_energy_oracle(bad, c, 2), std::invalid_argument);

    // independence of the generator enumeration order: relabel generators
    // by an even permutation applied to the covariance and the interaction
    auto omega_perm = [&](const std::vector<int>& perm) {
        GrassmannPoly wp(n);
        for (const auto& t : w.terms()) {
            GrassmannPoly::Mask mask = t.mask;
            GrassmannPoly mono = GrassmannPoly::scalar(n, t.coeff);
            while (mask) {
                int g = std::countr_zero(mask);
                mask &= mask - 1;
                mono = grassmann_product(mono, psi(n, perm[g]));
            }
            wp += mono;
        }
        Eigen::MatrixXcd cp(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cp(perm[i], perm[j]) = c(i, j);
        return free_energy_oracle(wp, cp, 3);
    };
    std::vector<int> perm{3, 7, 1, 0, 6, 2, 5, 4};
    auto shuffled = omega_perm(perm);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(shuffled[k] - omega[k]) < 1e-11);
}

TEST_CASE("bkar tree expansion matches the oracle order by order") {
    const int n = 6;
    auto rng = split_rng(808, 3);
    auto w = testing::random_homogeneous_poly(n, 4, rng, 0.2);
    auto c = testing::random_skew_matrix(n, rng, 0.7);

    auto oracle = free_energy_oracle(w, c, 3);
    auto expansion = free_energy_tree_expansion(w, c, 3);
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(expansion[k] - oracle[k]) <=
              1e-8 * std::max(1.0, std::abs(oracle[k])));
}
