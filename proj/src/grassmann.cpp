#include "fermitree/grassmann.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fermitree {
namespace grassmann {

namespace {

constexpr double kPi = 3.14159265358979323846;

int permutation_sign(std::span<const int> perm) {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inversions;
    return (inversions & 1) ? -1 : 1;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace

GrassmannPoly grassmann_product(const GrassmannPoly& a, const GrassmannPoly& b) {
    return exterior::wedge(a, b);
}

GrassmannPoly derivative(const GrassmannPoly& p, int g) {
    GrassmannPoly out(p.universe());
    const auto bit = GrassmannPoly::Mask{1} << g;
    for (const auto& t : p.terms()) {
        if (!(t.mask & bit)) continue;
        int below = std::popcount(t.mask & (bit - 1));
        double sign = (below & 1) ? -1.0 : 1.0;
        out.accumulate(t.mask ^ bit, sign * t.coeff);
    }
    out.compact();
    return out;
}

namespace {

Complex pfaffian_matching_impl(const Eigen::MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    if (n == 0) return 1.0;
    // expand along row 0: Pf(A) = sum_j (-1)^j a_{0j} Pf(A \ {0,j})
    Complex out = 0.0;
    for (int j = 1; j < n; ++j) {
        if (a(0, j) == Complex{}) continue;
        Eigen::MatrixXcd sub(n - 2, n - 2);
        int r = 0;
        for (int i = 1; i < n; ++i) {
            if (i == j) continue;
            int cidx = 0;
            for (int k = 1; k < n; ++k) {
                if (k == j) continue;
                sub(r, cidx++) = a(i, k);
            }
            ++r;
        }
        double sign = (j % 2 == 1) ? 1.0 : -1.0;
        out += sign * a(0, j) * pfaffian_matching_impl(sub);
    }
    return out;
}

Complex pfaffian_elimination_impl(Eigen::MatrixXcd a) {
    const int n = static_cast<int>(a.rows());
    if (n == 0) return 1.0;
    if (n % 2 == 1) return 0.0;
    Complex pf = 1.0;
    for (int k = 0; k + 1 < n; k += 2) {
        // pivot: largest |a(i,k)| for i > k
        int piv = k + 1;
        double best = std::abs(a(k + 1, k));
        for (int i = k + 2; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        if (best == 0.0) return 0.0;
        if (piv != k + 1) {
            a.row(piv).swap(a.row(k + 1));
            a.col(piv).swap(a.col(k + 1));
            pf = -pf;
        }
        pf *= a(k, k + 1);
        for (int j = k + 2; j < n; ++j) {
            Complex f = a(j, k) / a(k + 1, k);
            a.row(j) -= f * a.row(k + 1);
            a.col(j) -= f * a.col(k + 1);
        }
    }
    return pf;
}

}  // namespace

Complex pfaffian(const Eigen::MatrixXcd& a, PfaffianMethod method) {
    if (a.rows() != a.cols()) throw std::invalid_argument("pfaffian: not square");
    const int n = static_cast<int>(a.rows());
    if (n > 0) {
        double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        double skew_defect = (a + a.transpose()).cwiseAbs().maxCoeff();
        if (skew_defect > 1e-12 * scale)
            throw std::invalid_argument("pfaffian: input not skew-symmetric");
    }
    if (n % 2 == 1) return 0.0;
    switch (method) {
        case PfaffianMethod::matching_oracle:
            if (n > 10) throw std::invalid_argument("pfaffian: matching oracle limited to n <= 10");
            return pfaffian_matching_impl(a);
        case PfaffianMethod::elimination:
            return pfaffian_elimination_impl(a);
    }
    return 0.0;
}

Complex gaussian_integral(const GrassmannPoly& p, const Eigen::MatrixXcd& c) {
    Complex out = 0.0;
    std::vector<int> idx;
    for (const auto& t : p.terms()) {
        idx.clear();
        auto mask = t.mask;
        while (mask) {
            idx.push_back(std::countr_zero(mask));
            mask &= mask - 1;
        }
        if (idx.size() % 2 == 1) continue;
        if (idx.empty()) {
            out += t.coeff;
            continue;
        }
        const int k = static_cast<int>(idx.size());
        Eigen::MatrixXcd sub(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub(i, j) = c(idx[i], idx[j]);
        out += t.coeff * pfaffian_elimination_impl(std::move(sub));
    }
    return out;
}

DenseKernel antisymmetrize(const DenseKernel& f) {
    const int n = f.arity;
    if (n > 8) throw std::invalid_argument("antisymmetrize: arity > 8");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<std::vector<int>, int>> perms;
    do {
        perms.emplace_back(perm, permutation_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));

    DenseKernel out(n, f.points);
    const double inv_fact = 1.0 / factorial(n);
    std::vector<int> args(n), permuted(n);
    const std::size_t total = out.values.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int i = n - 1; i >= 0; --i) {
            args[i] = static_cast<int>(rest % f.points);
            rest /= f.points;
        }
        Complex acc = 0.0;
        for (const auto& [pm, sign] : perms) {
            for (int i = 0; i < n; ++i) permuted[i] = args[pm[i]];
            acc += double(sign) * f.value(permuted);
        }
        out.values[flat] = inv_fact * acc;
    }
    return out;
}

double sup_norm(const DenseKernel& f) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// One line of length n: y_k = sum_j x_j exp(sign * 2 pi i j k / n).
// Radix-2 Cooley-Tukey for powers of two, naive sum otherwise.
void transform_line(std::vector<Complex>& x, int sign) {
    const std::size_t n = x.size();
    if (n <= 1) return;
    if ((n & (n - 1)) != 0) {
        std::vector<Complex> out(n, Complex{});
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                out[k] += x[j] * std::polar(1.0, sign * 2.0 * kPi * double(j * k % n) / double(n));
        x = std::move(out);
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        Complex wl = std::polar(1.0, sign * 2.0 * kPi / double(len));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w = 1.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                Complex u = x[i + k], v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

void dft_inplace(const Lattice& torus, std::vector<Complex>& data, int sign) {
    const int axes = torus.axes();
    std::size_t inner = 1;
    for (int c = axes - 1; c >= 0; --c) {
        const std::size_t len = static_cast<std::size_t>(torus.dims[c]);
        const std::size_t outer = data.size() / (len * inner);
        std::vector<Complex> line(len);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t in = 0; in < inner; ++in) {
                const std::size_t base = o * len * inner + in;
                for (std::size_t i = 0; i < len; ++i) line[i] = data[base + i * inner];
                transform_line(line, sign);
                for (std::size_t i = 0; i < len; ++i) data[base + i * inner] = line[i];
            }
        inner *= len;
    }
}

}  // namespace

std::vector<Complex> hat_from_position(const Lattice& torus, std::span<const Complex> pos) {
    std::vector<Complex> hat(pos.begin(), pos.end());
    dft_inplace(torus, hat, +1);
    return hat;
}

std::vector<Complex> position_from_hat(const Lattice& torus, std::span<const Complex> hat) {
    std::vector<Complex> pos(hat.begin(), hat.end());
    dft_inplace(torus, pos, -1);
    const double inv = 1.0 / double(torus.sites());
    for (auto& v : pos) v *= inv;
    return pos;
}

namespace {

// Transform one argument slot of an arity-n momentum-spin table.
// direction = -1: hat -> position (with 1/|T|); +1: position -> hat.
DenseKernel slotwise_dft(const Lattice& torus, int spins, const DenseKernel& in, int direction) {
    const int sites = static_cast<int>(torus.sites());
    const int points = sites * spins;
    DenseKernel cur = in;
    std::vector<Complex> phase_table(static_cast<std::size_t>(sites) * sites);
    for (int p = 0; p < sites; ++p)
        for (int x = 0; x < sites; ++x)
            phase_table[std::size_t(p) * sites + x] =
                std::polar(1.0, direction * torus.phase(p, x));
    const double weight = (direction < 0) ? 1.0 / double(sites) : 1.0;

    for (int slot = 0; slot < in.arity; ++slot) {
        DenseKernel next(in.arity, points);
        std::size_t stride = 1;
        for (int s = slot + 1; s < in.arity; ++s) stride *= points;
        const std::size_t total = cur.values.size();
        for (std::size_t base = 0; base < total; ++base) {
            // decompose index: base = hi*points*stride + a*stride + lo
            std::size_t lo = base % stride;
            std::size_t a = (base / stride) % points;
            std::size_t hi = base / (stride * points);
            int sigma = static_cast<int>(a) % spins;
            int out_site = static_cast<int>(a) / spins;
            Complex acc = 0.0;
            for (int in_site = 0; in_site < sites; ++in_site) {
                std::size_t src = (hi * points + std::size_t(in_site) * spins + sigma) * stride + lo;
                // direction -1: out is position x, in is momentum p, phase e^{-ipx}
                // direction +1: out is momentum p, in is position x, phase e^{+ipx}
                int p = (direction < 0) ? in_site : out_site;
                int x = (direction < 0) ? out_site : in_site;
                acc += cur.values[src] * phase_table[std::size_t(p) * sites + x];
            }
            next.values[base] = weight * acc;
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

DenseKernel hat_from_position_slotwise(const Lattice& torus, int spins, const DenseKernel& pos) {
    return slotwise_dft(torus, spins, pos, +1);
}

DenseKernel position_from_hat_slotwise(const Lattice& torus, int spins, const DenseKernel& hat) {
    return slotwise_dft(torus, spins, hat, -1);
}

Covariance Covariance::from_hat(Lattice torus, int spins, std::vector<Complex> hat) {
    Covariance c;
    c.torus_ = std::move(torus);
    c.spins_ = spins;
    c.sites_ = static_cast<std::size_t>(c.torus_.sites());
    if (hat.size() != c.sites_ * spins * spins)
        throw std::invalid_argument("Covariance: wrong table size");
    c.hat_ = std::move(hat);
    c.pos_.resize(c.hat_.size());
    for (int s = 0; s < spins; ++s)
        for (int s2 = 0; s2 < spins; ++s2) {
            std::span<const Complex> slice(c.hat_.data() + (std::size_t(s) * spins + s2) * c.sites_,
                                           c.sites_);
            auto pos = position_from_hat(c.torus_, slice);
            std::copy(pos.begin(), pos.end(),
                      c.pos_.begin() + (std::size_t(s) * spins + s2) * c.sites_);
        }
    c.validate_antisymmetry();
    return c;
}

Covariance Covariance::from_position(Lattice torus, int spins, std::vector<Complex> pos) {
    Covariance c;
    c.torus_ = std::move(torus);
    c.spins_ = spins;
    c.sites_ = static_cast<std::size_t>(c.torus_.sites());
    if (pos.size() != c.sites_ * spins * spins)
        throw std::invalid_argument("Covariance: wrong table size");
    c.pos_ = std::move(pos);
    c.hat_.resize(c.pos_.size());
    for (int s = 0; s < spins; ++s)
        for (int s2 = 0; s2 < spins; ++s2) {
            std::span<const Complex> slice(c.pos_.data() + (std::size_t(s) * spins + s2) * c.sites_,
                                           c.sites_);
            auto hat = hat_from_position(c.torus_, slice);
            std::copy(hat.begin(), hat.end(),
                      c.hat_.begin() + (std::size_t(s) * spins + s2) * c.sites_);
        }
    c.validate_antisymmetry();
    return c;
}

void Covariance::validate_antisymmetry() const {
    double scale = 1.0;
    for (const auto& v : hat_) scale = std::max(scale, std::abs(v));
    for (int s = 0; s < spins_; ++s)
        for (int s2 = 0; s2 < spins_; ++s2)
            for (std::size_t p = 0; p < sites_; ++p) {
                Complex defect = hat(s, s2, static_cast<int>(p)) +
                                 hat(s2, s, torus_.negate(static_cast<int>(p)));
                if (std::abs(defect) > 1e-9 * scale)
                    throw std::invalid_argument(
                        "Covariance: table violates hat C_{ss'}(p) = -hat C_{s's}(-p)");
            }
}

Eigen::MatrixXcd Covariance::position_matrix() const {
    const int n_sites = static_cast<int>(sites_);
    const int n = n_sites * spins_;
    Eigen::MatrixXcd c(n, n);
    for (int x = 0; x < n_sites; ++x)
        for (int s = 0; s < spins_; ++s)
            for (int x2 = 0; x2 < n_sites; ++x2)
                for (int s2 = 0; s2 < spins_; ++s2) {
                    int diff = torus_.add(x2, torus_.negate(x));
                    c(x * spins_ + s, x2 * spins_ + s2) = position(s, s2, diff);
                }
    return c;
}

InteractionKernel::InteractionKernel(Lattice torus, int spins, DenseKernel hat)
    : torus_(std::move(torus)), spins_(spins), hat_(std::move(hat)) {
    if (hat_.points != static_cast<int>(torus_.sites()) * spins_)
        throw std::invalid_argument("InteractionKernel: point count mismatch");
}

DenseKernel InteractionKernel::position_kernel() const {
    return position_from_hat_slotwise(torus_, spins_, hat_);
}

double InteractionKernel::l1_position() const {
    DenseKernel w = position_kernel();
    double s = 0.0;
    for (const auto& v : w.values) s += std::abs(v);
    return s;
}

InteractionKernel build_interaction(const Lattice& torus, int phys_spins,
                                    const std::vector<double>& v) {
    const int sites = static_cast<int>(torus.sites());
    if (static_cast<int>(v.size()) != sites) throw std::invalid_argument("build_interaction: |v| != |T|");
    for (int x = 0; x < sites; ++x)
        if (std::abs(v[x] - v[torus.negate(x)]) > 1e-12)
            throw std::invalid_argument("build_interaction: v must be even");

    // sigma = (s, kappa) -> s*2 + kappa; kappa = 1 creation, 0 annihilation
    const int spins = phys_spins * 2;
    const int points = sites * spins;
    std::vector<Complex> v_hat(sites, Complex{});
    for (int q = 0; q < sites; ++q)
        for (int x = 0; x < sites; ++x) v_hat[q] += v[x] * std::polar(1.0, torus.phase(q, x));

    // raw kernel: hat K(l1..l4) = -1/2 d_{s1 s2'} ... v_hat(p1+p3) delta_{sum p = 0}
    // with kappa pattern (1,1,0,0), s3 = s1, s4 = s2.
    DenseKernel raw(4, points);
    for (int p1 = 0; p1 < sites; ++p1)
        for (int p2 = 0; p2 < sites; ++p2)
            for (int p3 = 0; p3 < sites; ++p3) {
                int p4 = torus.negate(torus.add(torus.add(p1, p2), p3));
                Complex val_base = -0.5 * v_hat[torus.add(p1, p3)];
                for (int s1 = 0; s1 < phys_spins; ++s1)
                    for (int s2 = 0; s2 < phys_spins; ++s2) {
                        std::array<int, 4> args = {
                            p1 * spins + (s1 * 2 + 1), p2 * spins + (s2 * 2 + 1),
                            p3 * spins + (s1 * 2 + 0), p4 * spins + (s2 * 2 + 0)};
                        raw.at(args) += val_base;
                    }
            }
    return InteractionKernel(torus, spins, antisymmetrize(raw));
}

std::vector<Complex> free_energy_oracle(const GrassmannPoly& w, const Eigen::MatrixXcd& c,
                                        int order, int generator_cap) {
    if (order < 1 || order > 4) throw std::invalid_argument("free_energy_oracle: order must be 1..4");
    if (w.universe() > generator_cap)
        throw std::invalid_argument("free_energy_oracle: generator cap exceeded");
    if (std::abs(w.coeff(0)) > 0.0)
        throw std::invalid_argument("free_energy_oracle: W must have no degree-0 part");

    // moments z_k = int W^k / k! dmu_C
    std::vector<Complex> z(order + 1, Complex{});
    GrassmannPoly power = GrassmannPoly::scalar(w.universe(), 1.0);
    double fact = 1.0;
    for (int k = 1; k <= order; ++k) {
        power = grassmann_product(power, w);
        fact *= k;
        z[k] = gaussian_integral(power, c) / fact;
    }

    // omega = log(1 + sum z_k g^k), truncated formal series
    std::vector<Complex> omega(order + 1, Complex{});
    std::vector<Complex> s_pow(order + 1, Complex{});
    s_pow[0] = 1.0;  // S^0
    std::vector<Complex> tmp(order + 1);
    for (int j = 1; j <= order; ++j) {
        // s_pow <- s_pow * S  (S has zero constant term)
        std::fill(tmp.begin(), tmp.end(), Complex{});
        for (int a = 0; a <= order; ++a)
            for (int b = 1; a + b <= order; ++b) tmp[a + b] += s_pow[a] * z[b];
        s_pow = tmp;
        double sign = (j % 2 == 1) ? 1.0 : -1.0;
        for (int k = j; k <= order; ++k) omega[k] += sign / double(j) * s_pow[k];
    }
    return {omega.begin() + 1, omega.end()};
}

namespace {

GrassmannPoly embed_block(const GrassmannPoly& w, int block, int n_gen, int total_gen) {
    GrassmannPoly out(total_gen);
    const int shift = block * n_gen;
    for (const auto& t : w.terms()) out.accumulate(t.mask << shift, t.coeff);
    out.compact();
    return out;
}

// Delta_e = sum_{xi,xi'} C(xi,xi') d/dpsi^a(xi) d/dpsi^b(xi'). The left-most
// derivative acts first; this is the order for which the interpolation
// identity d/ds int F dmu = sum_{xi,xi'} Cdot(xi,xi') d_a d_b int F holds
// with left derivatives. The operator is even, so edge order is immaterial.
GrassmannPoly apply_edge_operator(const GrassmannPoly& p, int block_a, int block_b, int n_gen,
                                  const Eigen::MatrixXcd& c) {
    using Mask = GrassmannPoly::Mask;
    GrassmannPoly out(p.universe());
    const Mask block_mask = (n_gen >= 64) ? ~Mask{0} : ((Mask{1} << n_gen) - 1);
    for (const auto& t : p.terms()) {
        Mask in_a = (t.mask >> (block_a * n_gen)) & block_mask;
        Mask in_b = (t.mask >> (block_b * n_gen)) & block_mask;
        Mask bits_a = in_a;
        while (bits_a) {
            int ga = std::countr_zero(bits_a);
            bits_a &= bits_a - 1;
            Mask ga_bit = Mask{1} << (block_a * n_gen + ga);
            int below_a = std::popcount(t.mask & (ga_bit - 1));
            Mask m1 = t.mask ^ ga_bit;
            Mask bits_b = in_b;
            while (bits_b) {
                int gb = std::countr_zero(bits_b);
                bits_b &= bits_b - 1;
                Mask gb_bit = Mask{1} << (block_b * n_gen + gb);
                int below_b = std::popcount(m1 & (gb_bit - 1));
                double sign = ((below_a + below_b) & 1) ? -1.0 : 1.0;
                out.accumulate(m1 ^ gb_bit, sign * c(ga, gb) * t.coeff);
            }
        }
    }
    out.compact();
    return out;
}

// Nested Gauss-Legendre over the ordered simplex 0 <= t_1 <= ... <= t_e <= upper.
Complex simplex_integral(int level, double upper, const std::vector<double>& nodes,
                         const std::vector<double>& weights, std::vector<double>& t,
                         const std::function<Complex(const std::vector<double>&)>& f) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double x = 0.5 * upper * (nodes[i] + 1.0);
        t[level] = x;
        Complex inner = (level == 0) ? f(t)
                                     : simplex_integral(level - 1, x, nodes, weights, t, f);
        acc += 0.5 * upper * weights[i] * inner;
    }
    return acc;
}

}  // namespace

Complex bkar_tree_term(const GrassmannPoly& w, const Eigen::MatrixXcd& c,
                       const trees::Tree& tree) {
    const int m = tree.m;
    const int n_gen = w.universe();
    if (m * n_gen > 64) throw std::invalid_argument("bkar_tree_term: replica algebra exceeds 64 generators");

    GrassmannPoly p = embed_block(w, 0, n_gen, m * n_gen);
    for (int l = 1; l < m; ++l) p = grassmann_product(p, embed_block(w, l, n_gen, m * n_gen));
    for (auto [a, b] : tree.edges) p = apply_edge_operator(p, a - 1, b - 1, n_gen, c);

    const int edges = m - 1;
    if (edges == 0) return gaussian_integral(p, c);

    auto big_cov = [&](const Eigen::MatrixXd& st) {
        Eigen::MatrixXcd big(m * n_gen, m * n_gen);
        for (int la = 0; la < m; ++la)
            for (int lb = 0; lb < m; ++lb)
                big.block(la * n_gen, lb * n_gen, n_gen, n_gen) = st(la, lb) * c;
        return big;
    };

    // integrand degree per s variable <= number of surviving loop pairs
    int pairs = std::max(p.degree(), 0) / 2;
    int npts = pairs + edges + 2;
    std::vector<double> nodes, weights;
    gauss_legendre(npts, nodes, weights);

    std::vector<int> order(edges);
    std::iota(order.begin(), order.end(), 0);
    Complex total = 0.0;
    std::vector<double> s(edges), t(edges);
    do {
        auto f = [&](const std::vector<double>& tval) {
            // ordering: s_{order[i]} = t_i with t_1 <= ... <= t_e
            for (int i = 0; i < edges; ++i) s[order[i]] = tval[i];
            auto st = trees::s_matrix(tree, s);
            return gaussian_integral(p, big_cov(st.matrix));
        };
        total += simplex_integral(edges - 1, 1.0, nodes, weights, t, f);
    } while (std::next_permutation(order.begin(), order.end()));
    return total;
}

std::vector<Complex> free_energy_tree_expansion(const GrassmannPoly& w,
                                                const Eigen::MatrixXcd& c, int m_max) {
    std::vector<Complex> out;
    double fact = 1.0;
    for (int m = 1; m <= m_max; ++m) {
        fact *= m;
        Complex sum = 0.0;
        if (m == 1) {
            sum = bkar_tree_term(w, c, trees::Tree(1, {}));
        } else {
            for (const auto& t : trees::enumerate_trees(m)) sum += bkar_tree_term(w, c, t);
        }
        out.push_back(sum / fact);
    }
    return out;
}

}  // namespace grassmann
}  // namespace fermitree
