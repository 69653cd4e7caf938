#include "fermitree/random_inputs.hpp"

namespace fermitree {
namespace testing {

grassmann::Covariance random_covariance(const Lattice& torus, int spins, Rng& rng, double scale) {
    const std::size_t sites = static_cast<std::size_t>(torus.sites());
    std::vector<Complex> raw(sites * spins * spins);
    for (auto& v : raw) v = scale * random_unit(rng);
    std::vector<Complex> hat(raw.size());
    for (int s = 0; s < spins; ++s)
        for (int s2 = 0; s2 < spins; ++s2)
            for (std::size_t p = 0; p < sites; ++p) {
                std::size_t ij = (std::size_t(s) * spins + s2) * sites + p;
                std::size_t ji =
                    (std::size_t(s2) * spins + s) * sites + torus.negate(static_cast<int>(p));
                hat[ij] = 0.5 * (raw[ij] - raw[ji]);
            }
    return grassmann::Covariance::from_hat(torus, spins, std::move(hat));
}

grassmann::InteractionKernel random_kernel(const Lattice& torus, int spins, int arity, Rng& rng,
                                           double scale) {
    const int points = static_cast<int>(torus.sites()) * spins;
    grassmann::DenseKernel raw(arity, points);
    // fill only momentum-conserving tuples; the shell is permutation
    // invariant, so antisymmetrization preserves it
    std::vector<int> args(arity);
    const std::size_t total = raw.values.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        int psum = 0;
        for (int i = arity - 1; i >= 0; --i) {
            args[i] = static_cast<int>(rest % points);
            rest /= points;
            psum = torus.add(psum, args[i] / spins);
        }
        if (psum == 0) raw.values[flat] = scale * random_unit(rng);
    }
    return grassmann::InteractionKernel(torus, spins, grassmann::antisymmetrize(raw));
}

Eigen::MatrixXcd random_skew_matrix(int n, Rng& rng, double scale) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            a(i, j) = scale * random_unit(rng);
            a(j, i) = -a(i, j);
        }
    return a;
}

grassmann::GrassmannPoly random_homogeneous_poly(int generators, int degree, Rng& rng,
                                                 double scale) {
    grassmann::GrassmannPoly w(generators);
    using Mask = grassmann::GrassmannPoly::Mask;
    for (Mask mask = 0; mask < (Mask{1} << generators); ++mask)
        if (std::popcount(mask) == degree) w.accumulate(mask, scale * random_unit(rng));
    w.compact();
    return w;
}

exterior::Form random_form(Rng& rng, int universe, int degree, int terms) {
    using Form = exterior::Form;
    std::uniform_int_distribution<int> pick(0, universe - 1);
    Form f(universe);
    for (int t = 0; t < terms; ++t) {
        Form::Mask m = 0;
        while (std::popcount(m) < degree) m |= Form::Mask{1} << pick(rng);
        f.accumulate(m, random_unit(rng));
    }
    f.compact();
    return f;
}

exterior::Form random_one_form(Rng& rng, int universe) {
    std::vector<Complex> c(universe);
    for (auto& v : c) v = random_unit(rng);
    return exterior::Form::one_form(c);
}

std::vector<amplitude::Leg> random_external_legs(const Lattice& torus, int spins, int count,
                                                 Rng& rng) {
    const int sites = static_cast<int>(torus.sites());
    std::vector<amplitude::Leg> legs(count);
    int total = 0;
    for (int i = 0; i < count; ++i) {
        legs[i].sigma = static_cast<int>(rng() % spins);
        if (i + 1 < count) {
            legs[i].p_flat = static_cast<int>(rng() % sites);
            total = torus.add(total, legs[i].p_flat);
        } else {
            legs[i].p_flat = torus.negate(total);
        }
    }
    return legs;
}

}  // namespace testing
}  // namespace fermitree
