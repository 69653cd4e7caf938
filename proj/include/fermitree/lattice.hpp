/// @file lattice.hpp
/// @brief Finite torus index arithmetic shared by position and momentum space.

#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

namespace fermitree {

/// Discrete torus T = Z/L_1 x ... x Z/L_D. The dual torus T* has the same
/// index set (momenta as integer vectors mod L_c); physical momenta are
/// 2*pi*p_c/L_c with unit lattice spacing.
struct Lattice {
    std::vector<int> dims;

    Lattice() = default;
    explicit Lattice(std::vector<int> d) : dims(std::move(d)) {
        for (int L : dims)
            if (L < 1) throw std::invalid_argument("Lattice: dimension < 1");
    }

    int axes() const { return static_cast<int>(dims.size()); }

    long long sites() const {
        long long n = 1;
        for (int L : dims) n *= L;
        return n;
    }

    int flatten(const std::vector<int>& x) const {
        int idx = 0;
        for (int c = 0; c < axes(); ++c) {
            int v = ((x[c] % dims[c]) + dims[c]) % dims[c];
            idx = idx * dims[c] + v;
        }
        return idx;
    }

    std::vector<int> unflatten(int idx) const {
        std::vector<int> x(axes());
        for (int c = axes() - 1; c >= 0; --c) {
            x[c] = idx % dims[c];
            idx /= dims[c];
        }
        return x;
    }

    int add(int a, int b) const {
        int out = 0, weight = 1;
        for (int c = axes() - 1; c >= 0; --c) {
            int L = dims[c];
            out += ((a % L + b % L) % L) * weight;
            a /= L;
            b /= L;
            weight *= L;
        }
        return out;
    }

    int negate(int a) const {
        int out = 0, weight = 1;
        for (int c = axes() - 1; c >= 0; --c) {
            int L = dims[c];
            out += ((L - a % L) % L) * weight;
            a /= L;
            weight *= L;
        }
        return out;
    }

    /// Signed representative of axis coordinate in [-L/2, L/2).
    int centered(int coord, int axis) const {
        int L = dims[axis];
        int v = ((coord % L) + L) % L;
        return (v >= (L + 1) / 2) ? v - L : v;
    }

    /// p . x = sum_c 2 pi p_c x_c / L_c for flattened indices.
    double phase(int p_flat, int x_flat) const;
};

inline double Lattice::phase(int p_flat, int x_flat) const {
    auto p = unflatten(p_flat);
    auto x = unflatten(x_flat);
    double s = 0.0;
    for (int c = 0; c < axes(); ++c)
        s += 2.0 * 3.14159265358979323846 * double(p[c]) * double(x[c]) / double(dims[c]);
    return s;
}

}  // namespace fermitree
