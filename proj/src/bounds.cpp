#include "fermitree/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace fermitree {
namespace bounds {

namespace {

constexpr double kPi = 3.14159265358979323846;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double pow_int(double base, int e) {
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

// n^n / n! with the 0^0 = 0! = 1 convention
double n_pow_over_fact(int n) {
    if (n == 0) return 1.0;
    return std::pow(double(n), double(n)) / factorial(n);
}

}  // namespace

CovarianceNorms covariance_norms(const grassmann::Covariance& c) {
    const auto& torus = c.torus();
    const int spins = c.spins();
    const int sites = static_cast<int>(torus.sites());
    const double weight = 1.0 / double(sites);
    const int axes = torus.axes();

    CovarianceNorms out;
    for (int s = 0; s < spins; ++s)
        for (int s2 = 0; s2 < spins; ++s2) {
            double pos_sum = 0.0;
            for (int p = 0; p < sites; ++p) {
                double ah = std::abs(c.hat(s, s2, p));
                out.sup_hat = std::max(out.sup_hat, ah);
                out.l1_hat += weight * ah;
                pos_sum += std::abs(c.position(s, s2, p));
            }
            out.l1_pos = std::max(out.l1_pos, pos_sum);
        }

    // mixed forward difference over all axes on the zero-extended
    // fundamental window (centered coordinates, no wraparound)
    std::vector<int> cmin(axes), cmax(axes);
    double inv_steps = 1.0;
    for (int a = 0; a < axes; ++a) {
        int L = torus.dims[a];
        cmin[a] = -(L / 2);
        cmax[a] = L - 1 - L / 2;
        inv_steps *= double(L) / (2.0 * kPi);
    }
    std::vector<int> ext(axes);
    long long ext_total = 1;
    for (int a = 0; a < axes; ++a) {
        ext[a] = torus.dims[a] + 1;
        ext_total *= ext[a];
    }
    std::vector<int> coord(axes), probe(axes);
    for (int s = 0; s < spins; ++s)
        for (int s2 = 0; s2 < spins; ++s2) {
            auto value_at = [&](const std::vector<int>& q) -> Complex {
                for (int a = 0; a < axes; ++a)
                    if (q[a] < cmin[a] || q[a] > cmax[a]) return {};
                return c.hat(s, s2, torus.flatten(q));
            };
            double l1 = 0.0;
            for (long long t = 0; t < ext_total; ++t) {
                long long rest = t;
                for (int a = axes - 1; a >= 0; --a) {
                    coord[a] = cmin[a] - 1 + static_cast<int>(rest % ext[a]);
                    rest /= ext[a];
                }
                Complex g = 0.0;
                for (int eps = 0; eps < (1 << axes); ++eps) {
                    int ones = 0;
                    for (int a = 0; a < axes; ++a) {
                        int bit = (eps >> a) & 1;
                        probe[a] = coord[a] + bit;
                        ones += bit;
                    }
                    double sign = ((axes - ones) & 1) ? -1.0 : 1.0;
                    g += sign * value_at(probe);
                }
                double ag = std::abs(g) * inv_steps;
                out.grad_sup = std::max(out.grad_sup, ag);
                l1 += ag;
            }
            out.grad_l1 += weight * l1;
        }
    return out;
}

double frak_c(const CovarianceNorms& n) {
    return n.l1_hat * n.grad_sup + n.grad_l1 * n.sup_hat;
}

double perturbative_bound(const CovarianceNorms& norms, const trees::Tree& t,
                          const std::vector<int>& n_per_vertex, const std::vector<double>& w_sup,
                          double const_param) {
    if (const_param <= 0.0) throw std::invalid_argument("perturbative_bound: const_param <= 0");
    double v = pow_int(const_param * norms.sup_hat, t.m - 1);
    for (int l = 1; l <= t.m; ++l)
        v *= factorial(t.degree(l)) * pow_int(2.0, n_per_vertex[l]) * w_sup[l];
    return v;
}

double standard_bound(const CovarianceNorms& norms, const trees::Tree& t,
                      const std::vector<int>& n_per_vertex, const std::vector<double>& w_l1) {
    int n = -2 * (t.m - 1);
    for (int l = 1; l <= t.m; ++l) n += n_per_vertex[l];
    if (n < 0) throw std::invalid_argument("standard_bound: negative external leg count");
    double v = std::pow(double(n), 0.5 * n) / factorial(n);
    if (n == 0) v = 1.0;
    v *= pow_int(norms.l1_pos, t.m - 1);
    for (int l = 1; l <= t.m; ++l)
        v *= factorial(t.degree(l)) * pow_int(2.0, n_per_vertex[l]) * w_l1[l];
    return v;
}

double theorem1_bound(const CovarianceNorms& norms, const trees::Tree& t,
                      const std::vector<int>& n_per_vertex, const std::vector<double>& w_sup,
                      int sigma_count, double volume) {
    int total = 0;
    for (int l = 1; l <= t.m; ++l) {
        if (n_per_vertex[l] < 2) throw std::invalid_argument("theorem1_bound: n_l < 2");
        total += n_per_vertex[l];
    }
    if (total % 2 != 0) throw std::invalid_argument("theorem1_bound: loop count not an integer");
    int n = total / 2 - (t.m - 1);
    if (n < 0) throw std::invalid_argument("theorem1_bound: negative loop count");

    double v = volume * n_pow_over_fact(n) * pow_int(norms.sup_hat, t.m - 1) *
               pow_int(norms.l1_hat, n);
    for (int l = 1; l <= t.m; ++l) {
        int d = t.degree(l);
        v *= factorial(d) * pow_int(2.0, n_per_vertex[l]) *
             pow_int(double(std::max(d - 1, 1)), n) * pow_int(double(sigma_count), n_per_vertex[l]) *
             w_sup[l];
    }
    return v;
}

double theorem2_bound(const CovarianceNorms& norms, int m, const std::vector<int>& n_per_vertex,
                      const std::vector<double>& w_sup_spine,
                      const std::vector<double>& w_l1_leaves, int sigma_count, double volume) {
    const int verts = 2 * m + 2;
    if (static_cast<int>(n_per_vertex.size()) != verts + 1)
        throw std::invalid_argument("theorem2_bound: n_per_vertex arity mismatch");
    if (static_cast<int>(w_sup_spine.size()) != m + 2 ||
        static_cast<int>(w_l1_leaves.size()) != m)
        throw std::invalid_argument("theorem2_bound: kernel norm arity mismatch");
    trees::Tree t = trees::caterpillar(m);
    int total = 0;
    for (int l = 1; l <= verts; ++l) total += n_per_vertex[l];
    if (total % 2 != 0) throw std::invalid_argument("theorem2_bound: loop count not an integer");
    int n = total / 2 - (2 * m + 1);
    if (n < 0) throw std::invalid_argument("theorem2_bound: negative loop count");

    double v = volume * n_pow_over_fact(n) * norms.sup_hat * pow_int(frak_c(norms), m) *
               pow_int(norms.l1_hat, n);
    for (int l = 1; l <= verts; ++l) v *= factorial(t.degree(l)) * pow_int(2.0, n_per_vertex[l]);
    for (int l = 1; l <= m + 2; ++l)
        v *= pow_int(double(sigma_count), n_per_vertex[l]) * w_sup_spine[l - 1];
    for (int l = m + 3; l <= verts; ++l) v *= w_l1_leaves[l - m - 3];
    return v;
}

double loop_bound(const CovarianceNorms& norms, double a_sup, int n_loops, double volume) {
    if (n_loops < 0) throw std::invalid_argument("loop_bound: n < 0");
    double pairing = factorial(2 * n_loops) / (pow_int(2.0, n_loops) * factorial(n_loops));
    return volume * pairing * pow_int(norms.l1_hat, n_loops) * a_sup;
}

CorollaryNorms corollary_effective_norm(const CovarianceNorms& norms,
                                        const std::map<int, double>& w_sup_by_arity, int b) {
    if (b < 0) throw std::invalid_argument("corollary_effective_norm: b < 0");
    CorollaryNorms out;
    const double e = std::exp(1.0);
    for (auto [n, sup] : w_sup_by_arity) {
        if (n < 2 || n % 2 != 0)
            throw std::invalid_argument("corollary_effective_norm: arity must be even and >= 2");
        double norm = norms.sup_hat * std::pow(norms.l1_hat, 0.5 * n - 1.0) * 8.0 / e *
                      std::pow(4.0 * std::exp(double(b) + 0.5), double(n)) * sup;
        out.per_n.emplace_back(n, norm);
        out.total += norm;
    }
    out.summable = out.total < 1.0;
    return out;
}

double corollary_output_bound(const CorollaryNorms& n, int b, int k) {
    if (!n.summable) throw std::domain_error("corollary_output_bound: |W| >= 1, bound undefined");
    return 8.0 * std::pow(4.0 * std::exp(double(b)), double(k)) * n.total / (1.0 - n.total);
}

double bump_phi(double u) {
    auto f = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    auto step = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        double a = f(t), bb = f(1.0 - t);
        return a / (a + bb);
    };
    constexpr double eps = 0.25;
    return step((2.0 - u) / eps) * step((u - 0.5) / eps);
}

int required_resolution(double M, int j) {
    // >= 6 grid points across the narrow shell width sqrt(2) M^-j
    return static_cast<int>(std::ceil(6.0 * 2.0 * kPi / (std::sqrt(2.0) * std::pow(M, -j))));
}

grassmann::Covariance build_single_scale(const ScaleModel& model) {
    if (model.j <= 0) throw std::invalid_argument("build_single_scale: j <= 0");
    if (model.d < 1) throw std::invalid_argument("build_single_scale: d < 1");
    const int axes = model.d + 1;
    Lattice torus(std::vector<int>(axes, model.points_per_axis));
    const int sites = static_cast<int>(torus.sites());
    const double m2j = std::pow(model.M, 2.0 * model.j);

    std::vector<Complex> ghat(sites);
    bool boundary_violation = false;
    std::vector<int> coord(axes);
    for (int p = 0; p < sites; ++p) {
        auto idx = torus.unflatten(p);
        bool on_boundary = false;
        double q0 = 0.0, psq = 0.0;
        for (int a = 0; a < axes; ++a) {
            int cc = torus.centered(idx[a], a);
            int L = torus.dims[a];
            if (cc == -(L / 2) || cc == L - 1 - L / 2) on_boundary = true;
            double q = 2.0 * kPi * double(cc) / double(L);
            if (a == 0)
                q0 = q;
            else
                psq += q * q;
        }
        double chi = bump_phi(m2j * (q0 * q0 + (psq - 1.0) * (psq - 1.0)));
        Complex val = (chi == 0.0) ? Complex{} : chi / Complex(1.0 - psq, q0);
        if (on_boundary && std::abs(val) > 0.0) boundary_violation = true;
        ghat[p] = val;
    }
    if (boundary_violation)
        throw std::runtime_error("build_single_scale: cutoff support touches the domain boundary");

    // kappa in {0,1}: hat C_{10}(P) = g(P)/2, hat C_{01}(P) = -g(-P)/2
    const int spins = 2;
    std::vector<Complex> hat(std::size_t(spins) * spins * sites, Complex{});
    for (int p = 0; p < sites; ++p) {
        hat[(1 * spins + 0) * std::size_t(sites) + p] = 0.5 * ghat[p];
        hat[(0 * spins + 1) * std::size_t(sites) + p] = -0.5 * ghat[torus.negate(p)];
    }
    return grassmann::Covariance::from_hat(std::move(torus), spins, std::move(hat));
}

grassmann::Covariance synthetic_scale_covariance(int sites, double M, int j) {
    Lattice torus({sites});
    double wd = double(sites) * std::pow(M, -2.0 * j);
    int width = std::max(1, static_cast<int>(std::llround(wd)));
    int start = sites / 8;
    double height = std::pow(M, double(j));
    std::vector<Complex> hat(sites, Complex{});
    for (int c = start; c < start + width; ++c) {
        hat[c] = height;
        hat[(sites - c) % sites] = -height;
    }
    return grassmann::Covariance::from_hat(std::move(torus), 1, std::move(hat));
}

Slope fit_log_slope(const std::vector<int>& j, const std::vector<double>& values, double M) {
    const int k = static_cast<int>(j.size());
    if (k < 3 || values.size() != j.size())
        throw std::invalid_argument("fit_log_slope: need at least 3 scales");
    std::vector<double> y(k);
    for (int i = 0; i < k; ++i) {
        if (values[i] <= 0.0) throw std::invalid_argument("fit_log_slope: nonpositive value");
        y[i] = std::log(values[i]) / std::log(M);
    }
    double xbar = 0.0, ybar = 0.0;
    for (int i = 0; i < k; ++i) xbar += j[i], ybar += y[i];
    xbar /= k, ybar /= k;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < k; ++i) {
        sxx += (j[i] - xbar) * (j[i] - xbar);
        sxy += (j[i] - xbar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_log_slope: degenerate fit");
    Slope s;
    s.value = sxy / sxx;
    double ss = 0.0;
    for (int i = 0; i < k; ++i) {
        double r = y[i] - ybar - s.value * (j[i] - xbar);
        ss += r * r;
    }
    s.stderr = (k > 2) ? std::sqrt(ss / double(k - 2) / sxx) : 0.0;
    return s;
}

PowerCountingReport power_counting_fit(const std::vector<int>& j,
                                       const std::vector<CovarianceNorms>& norms, double M) {
    if (j.size() != norms.size() || j.size() < 3)
        throw std::invalid_argument("power_counting_fit: need at least 3 scales");
    std::vector<double> sup, l1h, l1p, fc;
    for (const auto& n : norms) {
        sup.push_back(n.sup_hat);
        l1h.push_back(n.l1_hat);
        l1p.push_back(n.l1_pos);
        fc.push_back(frak_c(n));
    }
    PowerCountingReport r;
    r.sup_hat = fit_log_slope(j, sup, M);
    r.l1_hat = fit_log_slope(j, l1h, M);
    r.l1_pos = fit_log_slope(j, l1p, M);
    r.frak_c_slope = fit_log_slope(j, fc, M);
    return r;
}

}  // namespace bounds
}  // namespace fermitree
