#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fermitree/exterior.hpp"

using namespace fermitree;
using namespace fermitree::exterior;

namespace {

Form basis(int universe, std::initializer_list<int> idx) {
    Form::Mask m = 0;
    for (int i : idx) m |= Form::Mask{1} << i;
    return Form::monomial(universe, m, 1.0);
}

Form random_form(std::mt19937_64& rng, int universe, int degree, int terms) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, universe - 1);
    Form f(universe);
    for (int t = 0; t < terms; ++t) {
        Form::Mask m = 0;
        while (std::popcount(m) < degree) m |= Form::Mask{1} << pick(rng);
        f.accumulate(m, Complex(u(rng), u(rng)));
    }
    f.compact();
    return f;
}

Form random_one_form(std::mt19937_64& rng, int universe) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> c(universe);
    for (auto& v : c) v = Complex(u(rng), u(rng));
    return Form::one_form(c);
}

// independent parity oracle: count transpositions of a bubble sort
int bubble_sign(std::vector<int> seq) {
    int sign = 1;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = 0; j + 1 < seq.size(); ++j)
            if (seq[j] > seq[j + 1]) {
                std::swap(seq[j], seq[j + 1]);
                sign = -sign;
            }
    return sign;
}

}  // namespace

TEST_CASE("wedge basics") {
    Form e1 = basis(4, {0}), e2 = basis(4, {1}), e3 = basis(4, {2});

    CHECK(wedge(e1, e1).empty());

    // e2 ^ e1 = -(e1 ^ e2)
    Form a = wedge(e2, e1);
    Form b = wedge(e1, e2);
    CHECK(a.coeff(0b11).real() == doctest::Approx(-1.0));
    CHECK(b.coeff(0b11).real() == doctest::Approx(1.0));

    // (2 e1^e2) ^ (3 e3) = 6 e1^e2^e3
    Form c = wedge(2.0 * wedge(e1, e2), 3.0 * e3);
    CHECK(c.coeff(0b111).real() == doctest::Approx(6.0));

    CHECK_THROWS_AS(wedge(basis(3, {0}), basis(4, {0})), std::invalid_argument);
}

TEST_CASE("wedge is associative and bilinear") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Form a = random_form(rng, 8, 2, 5);
        Form b = random_form(rng, 8, 1, 4);
        Form c = random_form(rng, 8, 2, 5);
        Form left = wedge(wedge(a, b), c);
        Form right = wedge(a, wedge(b, c));
        CHECK(left.distance(right) < 1e-12);

        Form sum = wedge(a + c, b);
        Form parts = wedge(a, b) + wedge(c, b);
        CHECK(sum.distance(parts) < 1e-12);
    }
}

TEST_CASE("graded antisymmetry") {
    std::mt19937_64 rng(7);
    for (int ka = 1; ka <= 3; ++ka)
        for (int kb = 1; kb <= 3; ++kb) {
            Form a = random_form(rng, 9, ka, 6);
            Form b = random_form(rng, 9, kb, 6);
            Form ab = wedge(a, b);
            Form ba = wedge(b, a);
            double sign = (ka * kb % 2 == 0) ? 1.0 : -1.0;
            CHECK(ab.distance(sign * ba) < 1e-12);
        }
}

TEST_CASE("lp norms") {
    Form f = basis(4, {0}) + basis(4, {1});
    CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(2.0)));
    Form g = 2.0 * wedge(basis(4, {0}), basis(4, {1}));
    CHECK(lp_norm(g, 1.0) == doctest::Approx(2.0));

    std::mt19937_64 rng(3);
    Form h = random_form(rng, 8, 2, 10);
    double mx = 0.0;
    for (const auto& t : h.terms()) mx = std::max(mx, std::abs(t.coeff));
    CHECK(lp_norm(h, std::numeric_limits<double>::infinity()) == doctest::Approx(mx));

    CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("top integral picks the full tuple with its sign") {
    const int n = 5;
    Form full(n);
    full.accumulate((Form::Mask{1} << n) - 1, 1.0);
    full.compact();
    CHECK(top_integral(full).real() == doctest::Approx(1.0));
    CHECK(top_integral(basis(n, {0, 1, 2})) == Complex{});

    // permuted wedges pick up sgn(pi), cross-checked with a bubble-sort oracle
    std::mt19937_64 rng(19);
    std::vector<int> perm{0, 1, 2, 3, 4};
    for (int trial = 0; trial < 30; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        Form w = Form::scalar(n, 1.0);
        for (int i : perm) w = wedge(w, basis(n, {i}));
        CHECK(top_integral(w).real() == doctest::Approx(double(bubble_sign(perm))));
    }
}

TEST_CASE("interior product and CCR") {
    Form e12 = wedge(basis(4, {0}), basis(4, {1}));
    Form d = interior_product(basis(4, {0}), e12);
    CHECK(d.distance(basis(4, {1})) < 1e-15);
    CHECK(interior_product(basis(4, {2}), e12).empty());
    CHECK_THROWS_AS(interior_product(e12, e12), std::invalid_argument);

    // {delta_v, delta_v*} = |v|_2^2 id on every basis form, exact to rounding
    std::mt19937_64 rng(23);
    const int n = 6;
    for (int trial = 0; trial < 10; ++trial) {
        Form v = random_one_form(rng, n);
        double norm2 = lp_norm(v, 2.0) * lp_norm(v, 2.0);
        for (Form::Mask mask = 0; mask < (Form::Mask{1} << n); ++mask) {
            Form b = Form::monomial(n, mask, 1.0);
            Form anti = wedge(v, interior_product(v, b)) + interior_product(v, wedge(v, b));
            CHECK(anti.distance(norm2 * b) < 1e-12);
        }
    }

    // spec example: v = e1 + e2 gives {d_v, d_v*}(e1) = 2 e1
    Form v = basis(4, {0}) + basis(4, {1});
    Form e1 = basis(4, {0});
    Form anti = wedge(v, interior_product(v, e1)) + interior_product(v, wedge(v, e1));
    CHECK(anti.distance(2.0 * e1) < 1e-14);
}

TEST_CASE("shuffle bound values") {
    CHECK(shuffle_bound({1, 1}, 2.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(shuffle_bound({2, 1}, 2.0) == doctest::Approx(std::sqrt(3.0)));
    CHECK(shuffle_bound({1, 1}, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(shuffle_bound({}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(shuffle_bound({1}, 0.5), std::invalid_argument);
}

TEST_CASE("shuffle submultiplicativity on random products") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> deg(1, 3);
    for (double p : {1.0, 2.0, 3.0}) {
        for (int trial = 0; trial < 150; ++trial) {
            int n = 2 + int(rng() % 2);
            std::vector<Form> factors;
            std::vector<int> degrees;
            for (int i = 0; i < n; ++i) {
                int k = deg(rng);
                degrees.push_back(k);
                factors.push_back(random_form(rng, 10, k, 4));
            }
            Form prod = Form::scalar(10, 1.0);
            double rhs = shuffle_bound(degrees, p);
            for (const auto& f : factors) {
                prod = wedge(prod, f);
                rhs *= lp_norm(f, p);
            }
            CHECK(lp_norm(prod, p) <= rhs * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("rank-1 l2 contraction") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 500; ++trial) {
        int k = 1 + int(rng() % 3);
        Form a = Form::scalar(9, 1.0);
        for (int i = 0; i < k; ++i) a = wedge(a, random_one_form(rng, 9));
        Form b = random_form(rng, 9, 1 + int(rng() % 3), 5);
        double lhs = lp_norm(wedge(a, b), 2.0);
        double rhs = lp_norm(a, 2.0) * lp_norm(b, 2.0);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}
