#include "fermitree/suites.hpp"

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "fermitree/amplitude.hpp"
#include "fermitree/io.hpp"
#include "fermitree/random_inputs.hpp"
#include "json.hpp"

namespace fermitree {
namespace suites {

using nlohmann::json;
using namespace fermitree::testing;
using exterior::Form;

namespace {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(threads, static_cast<int>(count));
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

double rel_error(Complex a, Complex b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// all labeled trees of size m, with the edgeless tree at m = 1
std::vector<trees::Tree> trees_of_size(int m) {
    if (m == 1) return {trees::Tree(1, {})};
    return trees::enumerate_trees(m);
}

// legs-per-vertex assignments with n_l in [2, n_max], n_l >= d^T(l),
// and external leg count n(n,m) <= 6
std::vector<std::vector<int>> leg_assignments(const trees::Tree& t, int n_max) {
    std::vector<std::vector<int>> out;
    std::vector<int> n(t.m + 1, 2);
    while (true) {
        bool ok = true;
        int total = 0;
        for (int l = 1; l <= t.m && ok; ++l) {
            ok = n[l] >= t.degree(l);
            total += n[l];
        }
        if (ok && total - 2 * (t.m - 1) <= 6) out.push_back(n);
        int d = t.m;
        while (d >= 1 && n[d] == n_max) n[d--] = 2;
        if (d < 1) break;
        n[d]++;
    }
    return out;
}

struct RecursionInstance {
    int m;
    int tree_index;
    trees::Tree tree;
    std::vector<int> n_per_vertex;
    int sigma_count;
};

std::vector<RecursionInstance> recursion_instances(const RunConfig& config) {
    std::vector<RecursionInstance> out;
    for (int m = 1; m <= config.m_max; ++m) {
        auto all = trees_of_size(m);
        for (int ti = 0; ti < static_cast<int>(all.size()); ++ti)
            for (const auto& n : leg_assignments(all[ti], config.n_max))
                for (int sc = 1; sc <= 2; ++sc) out.push_back({m, ti, all[ti], n, sc});
    }
    return out;
}

json instance_json(const RecursionInstance& inst, const RunConfig& config) {
    return json{{"m", inst.m},
                {"tree", io::tree_id(inst.tree)},
                {"n", std::vector<int>(inst.n_per_vertex.begin() + 1, inst.n_per_vertex.end())},
                {"sigmas", inst.sigma_count},
                {"lattice", config.lattice},
                {"seed", config.seed}};
}

}  // namespace

int SuiteReport::failures() const {
    int f = 0;
    for (const auto& r : rows) f += !r.pass;
    return f;
}

std::string SuiteReport::jsonl() const {
    std::ostringstream os;
    for (const auto& r : rows) {
        json j{{"schema_version", io::kSchemaVersion}, {"suite", r.suite}, {"index", r.index},
               {"pass", r.pass},                       {"error", r.error}, {"tol", r.tolerance}};
        j["detail"] = r.detail.empty() ? json::object() : json::parse(r.detail);
        os << j.dump() << "\n";
    }
    return os.str();
}

std::string SuiteReport::csv() const {
    std::ostringstream os;
    os << "suite,index,pass,error,tolerance\n";
    for (const auto& r : rows)
        os << r.suite << "," << r.index << "," << (r.pass ? 1 : 0) << "," << r.error << ","
           << r.tolerance << "\n";
    return os.str();
}

SuiteReport run_pfaffian(const RunConfig& config) {
    SuiteReport rep{"pfaffian", {}};
    const int count = 100;
    rep.rows.resize(count + 50);
    // Pf^2 = det on random skew matrices up to 12x12 (1e-9 relative)
    for (int i = 0; i < count; ++i) {
        auto rng = split_rng(config.seed, i);
        int n = 2 + static_cast<int>(rng() % 11);  // 2..12, odd included
        auto a = random_skew_matrix(n, rng);
        Complex pf = grassmann::pfaffian(a, grassmann::PfaffianMethod::elimination);
        Complex det = a.determinant();
        double err = std::abs(pf * pf - det) / std::max(1.0, std::abs(det));
        rep.rows[i] = {"pfaffian", std::uint64_t(i), err <= 1e-9, err, 1e-9,
                       json{{"check", "pf2_det"}, {"n", n}, {"seed", config.seed}}.dump()};
    }
    // elimination vs matching oracle up to 8x8 (1e-10)
    for (int i = 0; i < 50; ++i) {
        auto rng = split_rng(config.seed, 1000 + i);
        int n = 2 * (1 + static_cast<int>(rng() % 4));  // 2..8 even
        auto a = random_skew_matrix(n, rng);
        Complex pe = grassmann::pfaffian(a, grassmann::PfaffianMethod::elimination);
        Complex pm = grassmann::pfaffian(a, grassmann::PfaffianMethod::matching_oracle);
        double err = std::abs(pe - pm) / std::max(1.0, std::abs(pm));
        rep.rows[count + i] = {"pfaffian", std::uint64_t(count + i), err <= 1e-10, err, 1e-10,
                               json{{"check", "elim_vs_matching"}, {"n", n}}.dump()};
    }
    return rep;
}

SuiteReport run_recursion(const RunConfig& config) {
    SuiteReport rep{"recursion", {}};
    auto instances = recursion_instances(config);
    rep.rows.resize(instances.size());
    Lattice torus({config.lattice});

    parallel_for(instances.size(), config.threads, [&](std::size_t idx) {
        const auto& inst = instances[idx];
        auto rng = split_rng(config.seed, idx);
        auto cov = random_covariance(torus, inst.sigma_count, rng, 0.8);

        std::map<int, grassmann::InteractionKernel> kernels;
        for (int l = 1; l <= inst.m; ++l) {
            int arity = inst.n_per_vertex[l];
            if (!kernels.count(arity))
                kernels.emplace(arity,
                                random_kernel(torus, inst.sigma_count, arity, rng, 0.8));
        }

        double max_err = 0.0;
        for (int c = 0; c < config.configs; ++c) {
            int root = 1 + static_cast<int>(rng() % inst.m);
            auto rooted = trees::root_tree(inst.tree, root);
            int n_ext = 0;
            for (int l = 1; l <= inst.m; ++l)
                n_ext += inst.n_per_vertex[l] - rooted.degree[l];
            auto legs = random_external_legs(torus, inst.sigma_count, n_ext, rng);

            std::vector<const grassmann::InteractionKernel*> kptr(inst.m + 1, nullptr);
            for (int l = 1; l <= inst.m; ++l) kptr[l] = &kernels.at(inst.n_per_vertex[l]);
            amplitude::AmplitudeProblem problem(rooted, inst.n_per_vertex, &cov, kptr, legs);

            // assembled kernel vs the n!-permutation oracle
            Complex lhs = amplitude::kernel_hat_A(problem);
            Complex rhs = amplitude::kernel_antisymmetrization_oracle(problem);
            max_err = std::max(max_err, rel_error(lhs, rhs));

            // recursion vs direct-sum oracle, coefficient-wise
            const int spin_digits = 2 * (inst.m - 1) + n_ext;
            double assignments = std::pow(double(inst.sigma_count), spin_digits);
            if (assignments <= 256.0) {
                amplitude::for_each_spin_assignment(problem, [&](const amplitude::SpinAssignment& sa) {
                    Form a = amplitude::recurse_alpha(problem, sa);
                    Form b = amplitude::oracle_direct_alpha(problem, sa);
                    double scale = std::max(
                        {1.0, exterior::lp_norm(a, std::numeric_limits<double>::infinity()),
                         exterior::lp_norm(b, std::numeric_limits<double>::infinity())});
                    max_err = std::max(max_err, a.distance(b) / scale);
                });
            } else {
                for (int s = 0; s < 8; ++s) {
                    amplitude::SpinAssignment sa;
                    sa.line.assign(inst.m + 1, {0, 0});
                    for (int l = 1; l <= inst.m; ++l)
                        if (l != root)
                            sa.line[l] = {static_cast<int>(rng() % inst.sigma_count),
                                          static_cast<int>(rng() % inst.sigma_count)};
                    sa.slot.resize(n_ext);
                    for (auto& v : sa.slot) v = static_cast<int>(rng() % inst.sigma_count);
                    Form a = amplitude::recurse_alpha(problem, sa);
                    Form b = amplitude::oracle_direct_alpha(problem, sa);
                    double scale = std::max(
                        {1.0, exterior::lp_norm(a, std::numeric_limits<double>::infinity()),
                         exterior::lp_norm(b, std::numeric_limits<double>::infinity())});
                    max_err = std::max(max_err, a.distance(b) / scale);
                }
            }
        }
        rep.rows[idx] = {"recursion", idx, max_err <= config.tol, max_err, config.tol,
                         instance_json(inst, config).dump()};
    });
    return rep;
}

SuiteReport run_free_energy(const RunConfig& config) {
    SuiteReport rep{"free-energy", {}};
    struct Setup {
        int generators;
        int m_max;
        bool with_quadratic;
    };
    const std::vector<Setup> setups = {{6, 3, false}, {6, 3, true}, {8, 2, false}, {10, 2, false}};
    std::uint64_t row_index = 0;
    for (std::size_t i = 0; i < setups.size(); ++i) {
        auto rng = split_rng(config.seed, 7000 + i);
        const auto& s = setups[i];
        auto w = random_homogeneous_poly(s.generators, 4, rng, 1.0 / s.generators);
        if (s.with_quadratic) w += random_homogeneous_poly(s.generators, 2, rng, 1.0 / s.generators);
        auto c = random_skew_matrix(s.generators, rng, 0.6);

        auto oracle = grassmann::free_energy_oracle(w, c, s.m_max);
        auto expansion = grassmann::free_energy_tree_expansion(w, c, s.m_max);
        for (int k = 0; k < s.m_max; ++k) {
            double err = rel_error(expansion[k], oracle[k]);
            rep.rows.push_back(
                {"free-energy", row_index++, err <= 1e-8, err, 1e-8,
                 json{{"generators", s.generators},
                      {"order", k + 1},
                      {"quadratic_part", s.with_quadratic},
                      {"seed", config.seed}}
                     .dump()});
        }
    }
    return rep;
}

SuiteReport run_gram(const RunConfig& config) {
    SuiteReport rep{"gram", {}};
    Lattice torus({6});
    const int sites = 6;
    rep.rows.resize(200);
    parallel_for(200, config.threads, [&](std::size_t i) {
        auto rng = split_rng(config.seed, 4000 + i);
        int n = 2 + static_cast<int>(i % 4);  // 2..5
        grassmann::DenseKernel raw(n, sites);
        for (auto& v : raw.values) v = random_unit(rng);
        auto f = grassmann::antisymmetrize(raw);
        double sup = grassmann::sup_norm(f);
        // hat f(x) = sum_p f(p) e^{i p x}; |hat f|_1 = |T|^-n sum_x |hat f|
        auto fhat = grassmann::hat_from_position_slotwise(torus, 1, f);
        double l1 = 0.0;
        for (const auto& v : fhat.values) l1 += std::abs(v);
        l1 /= std::pow(double(sites), n);
        double fact = 1.0;
        for (int j = 2; j <= n; ++j) fact *= j;
        double bound = std::pow(double(n), 0.5 * n) / fact * l1;
        double err = (sup <= bound) ? 0.0 : (sup - bound) / std::max(1.0, bound);
        rep.rows[i] = {"gram", i, sup <= bound * (1.0 + 1e-12), err, 0.0,
                       json{{"n", n}, {"seed", config.seed}}.dump()};
    });
    return rep;
}

SuiteReport run_ibp(const RunConfig& config) {
    SuiteReport rep{"ibp", {}};
    rep.rows.resize(100);
    parallel_for(100, config.threads, [&](std::size_t i) {
        auto rng = split_rng(config.seed, 5000 + i);
        int domain = (i % 2 == 0) ? 16 : 32;
        int t_min = -domain / 2;
        std::vector<Complex> window(domain, Complex{});
        int lo = t_min + 2 + static_cast<int>(rng() % (domain / 4));
        int hi = lo + 1 + static_cast<int>(rng() % (domain / 3));
        hi = std::min(hi, domain / 2 - 3);
        for (int t = lo; t <= hi; ++t) window[t - t_min] = random_unit(rng);

        const int universe = 4 + static_cast<int>(rng() % 3);
        std::vector<int> momenta(universe);
        for (auto& p : momenta) p = static_cast<int>(rng() % 5) - 2;

        int a_factors = 1 + static_cast<int>(rng() % 2);
        Form a = Form::scalar(universe, 1.0);
        for (int f = 0; f < a_factors; ++f) a = exterior::wedge(a, random_one_form(rng, universe));
        Form ap = random_form(rng, universe, 1 + static_cast<int>(rng() % 2), 4);

        auto res = amplitude::ibp_apply(window, t_min, momenta, a, ap);
        bool pass = res.identity_residual <= 1e-12 && res.lhs_l2 <= res.bound * (1.0 + 1e-12);
        json detail{{"domain", domain},
                    {"support", json::array({lo, hi})},
                    {"universe", universe},
                    {"seed", config.seed}};
        rep.rows[i] = CaseRow{"ibp", i, pass, res.identity_residual, 1e-12, detail.dump()};
    });
    return rep;
}

SuiteReport run_submult(const RunConfig& config) {
    SuiteReport rep{"submult", {}};
    rep.rows.resize(1100);
    // shuffle submultiplicativity on random products, |I| <= 10
    parallel_for(500, config.threads, [&](std::size_t i) {
        auto rng = split_rng(config.seed, 6000 + i);
        double p = (i % 3 == 0) ? 1.0 : ((i % 3 == 1) ? 2.0 : 3.0);
        int n = 2 + static_cast<int>(rng() % 2);
        Form prod = Form::scalar(10, 1.0);
        std::vector<int> degrees;
        double rhs = 1.0;
        for (int f = 0; f < n; ++f) {
            int k = 1 + static_cast<int>(rng() % 3);
            degrees.push_back(k);
            Form x = random_form(rng, 10, k, 4);
            rhs *= exterior::lp_norm(x, p);
            prod = exterior::wedge(prod, x);
        }
        rhs *= exterior::shuffle_bound(degrees, p);
        double lhs = exterior::lp_norm(prod, p);
        double err = lhs <= rhs ? 0.0 : (lhs - rhs) / std::max(1.0, rhs);
        rep.rows[i] = {"submult", i, lhs <= rhs * (1.0 + 1e-12), err, 0.0,
                       json{{"check", "shuffle"}, {"p", p}}.dump()};
    });
    // rank-1 l2 contraction
    parallel_for(500, config.threads, [&](std::size_t i) {
        auto rng = split_rng(config.seed, 6500 + i);
        int k = 1 + static_cast<int>(rng() % 3);
        Form a = Form::scalar(9, 1.0);
        for (int f = 0; f < k; ++f) a = exterior::wedge(a, random_one_form(rng, 9));
        Form b = random_form(rng, 9, 1 + static_cast<int>(rng() % 3), 5);
        double lhs = exterior::lp_norm(exterior::wedge(a, b), 2.0);
        double rhs = exterior::lp_norm(a, 2.0) * exterior::lp_norm(b, 2.0);
        double err = lhs <= rhs ? 0.0 : (lhs - rhs) / std::max(1.0, rhs);
        rep.rows[500 + i] = {"submult", 500 + i, lhs <= rhs * (1.0 + 1e-12), err, 0.0,
                             json{{"check", "rank1"}}.dump()};
    });
    // CCR {delta_v, delta_v*} = |v|^2 id, exact to 1e-12
    parallel_for(100, config.threads, [&](std::size_t i) {
        auto rng = split_rng(config.seed, 6900 + i);
        const int n = 7;
        Form v = random_one_form(rng, n);
        double norm2 = std::pow(exterior::lp_norm(v, 2.0), 2.0);
        double err = 0.0;
        for (int b = 0; b < 16; ++b) {
            Form::Mask mask = rng() & ((Form::Mask{1} << n) - 1);
            Form basis = Form::monomial(n, mask, 1.0);
            Form anti = exterior::wedge(v, exterior::interior_product(v, basis)) +
                        exterior::interior_product(v, exterior::wedge(v, basis));
            err = std::max(err, anti.distance(norm2 * basis));
        }
        rep.rows[1000 + i] = {"submult", 1000 + i, err <= 1e-12, err, 1e-12,
                              json{{"check", "ccr"}}.dump()};
    });
    return rep;
}

SuiteReport run_suite(const std::string& name, const RunConfig& config) {
    if (name == "pfaffian") return run_pfaffian(config);
    if (name == "recursion") return run_recursion(config);
    if (name == "free-energy") return run_free_energy(config);
    if (name == "gram") return run_gram(config);
    if (name == "ibp") return run_ibp(config);
    if (name == "submult") return run_submult(config);
    throw std::invalid_argument("unknown suite: " + name);
}

namespace {

// sup over momentum-conserving external tuples of |kernel_hat_A| and of the
// unsymmetrized direct kernel
struct KernelSups {
    double assembled = 0.0;
    double direct = 0.0;
};

KernelSups kernel_sups(amplitude::AmplitudeProblem& problem) {
    const auto& torus = problem.torus();
    const int sites = static_cast<int>(torus.sites());
    const int spins = problem.spins();
    const int n = problem.layout.total();
    KernelSups out;
    std::vector<int> odo(n - 1, 0);
    const int points = sites * spins;
    while (true) {
        int psum = 0;
        for (int i = 0; i < n - 1; ++i) {
            problem.external[i] = {odo[i] / spins, odo[i] % spins};
            psum = torus.add(psum, problem.external[i].p_flat);
        }
        for (int s = 0; s < spins; ++s) {
            problem.external[n - 1] = {torus.negate(psum), s};
            out.assembled = std::max(out.assembled, std::abs(amplitude::kernel_hat_A(problem)));
            out.direct = std::max(
                out.direct, std::abs(amplitude::oracle_direct_kernel(problem, problem.external)));
        }
        int d = n - 2;
        while (d >= 0 && odo[d] == points - 1) odo[d--] = 0;
        if (d < 0) break;
        odo[d]++;
    }
    return out;
}

}  // namespace

std::vector<bounds::BoundReport> run_bound_table(const RunConfig& config) {
    std::vector<bounds::BoundReport> out;
    Lattice torus({4});
    const auto cat1 = trees::caterpillar(1);

    for (int sigma_count : {1, 2}) {
        auto rng = split_rng(config.seed, 9000 + sigma_count);
        auto cov = random_covariance(torus, sigma_count, rng, 0.8);
        auto norms = bounds::covariance_norms(cov);
        std::map<int, grassmann::InteractionKernel> kernels;
        for (int arity = 2; arity <= 4; ++arity)
            kernels.emplace(arity, random_kernel(torus, sigma_count, arity, rng, 0.8));
        const double volume = double(torus.sites());

        int max_m = (sigma_count == 1) ? config.m_max : 2;
        for (int m = 1; m <= max_m; ++m) {
            for (const auto& tree : trees_of_size(m)) {
                for (const auto& n : leg_assignments(tree, config.n_max)) {
                    int total = 0;
                    for (int l = 1; l <= m; ++l) total += n[l];
                    if (total % 2 != 0) continue;
                    int n_ext = total - 2 * (m - 1);
                    if (sigma_count == 2 && n_ext > 4) continue;

                    auto rooted = trees::root_tree(tree, 1);
                    std::vector<const grassmann::InteractionKernel*> kptr(m + 1, nullptr);
                    std::vector<double> w_sup(m + 1, 0.0), w_l1(m + 1, 0.0);
                    for (int l = 1; l <= m; ++l) {
                        kptr[l] = &kernels.at(n[l]);
                        w_sup[l] = kptr[l]->sup_hat();
                        w_l1[l] = kptr[l]->l1_position();
                    }
                    std::vector<amplitude::Leg> legs(n_ext, {0, 0});
                    amplitude::AmplitudeProblem problem(rooted, n, &cov, kptr, legs);

                    bounds::BoundReport row;
                    row.tree_id = io::tree_id(tree);
                    row.n_per_vertex = n;
                    row.external_legs = n_ext;
                    row.branch_excess = trees::branch_excess(tree);
                    row.perturbative = bounds::perturbative_bound(norms, tree, n, w_sup);
                    row.standard = bounds::standard_bound(norms, tree, n, w_l1);
                    row.theorem1 =
                        bounds::theorem1_bound(norms, tree, n, w_sup, sigma_count, volume);

                    auto sups = kernel_sups(problem);
                    double amp = std::abs(amplitude::tree_amplitude_value(problem));
                    row.amplitude_abs = amp;
                    row.bound_only = false;
                    row.loop = bounds::loop_bound(norms, sups.assembled, n_ext / 2, volume);

                    const double slack = 1.0 + 1e-9;
                    row.domination_ok = row.theorem1 * slack >= amp &&
                                        *row.loop * slack >= amp &&
                                        row.standard * slack >= sups.assembled;
                    if (sigma_count == 1)
                        row.domination_ok =
                            row.domination_ok && row.perturbative * slack >= sups.direct;

                    if (m == 4 && tree.edges == cat1.edges) {
                        std::vector<double> spine{w_sup[1], w_sup[2], w_sup[3]};
                        std::vector<double> leaves{w_l1[4]};
                        row.theorem2 = bounds::theorem2_bound(norms, 1, n, spine, leaves,
                                                              sigma_count, volume);
                        row.domination_ok = row.domination_ok && *row.theorem2 * slack >= amp;
                    }
                    out.push_back(std::move(row));
                }
            }
        }
    }
    return out;
}

std::vector<CorollaryCheck> run_corollary_check(const RunConfig& config) {
    Lattice torus({4});
    auto rng = split_rng(config.seed, 11000);
    auto cov = random_covariance(torus, 1, rng, 0.8);
    auto norms = bounds::covariance_norms(cov);
    // the effective norm carries (4 e^(b+1/2))^n, so |W| < 1 needs a small
    // coupling at b = 2
    const double scale = 1e-9;
    std::map<int, grassmann::InteractionKernel> kernels;
    kernels.emplace(2, random_kernel(torus, 1, 2, rng, scale));
    kernels.emplace(4, random_kernel(torus, 1, 4, rng, scale));
    std::map<int, double> sups{{2, kernels.at(2).sup_hat()}, {4, kernels.at(4).sup_hat()}};

    std::vector<CorollaryCheck> out;
    const int sites = static_cast<int>(torus.sites());
    for (int b : {0, 2}) {
        auto eff = bounds::corollary_effective_norm(norms, sups, b);
        for (int k : {2, 4}) {
            // hat w'_k on the shell: sum over m <= 3, T in T_{m,b}, n in {2,4}^m
            double sup_wk = 0.0;
            std::vector<int> odo(k - 1, 0);
            while (true) {
                int psum = 0;
                std::vector<amplitude::Leg> legs(k);
                for (int i = 0; i < k - 1; ++i) {
                    legs[i] = {odo[i], 0};
                    psum = torus.add(psum, odo[i]);
                }
                legs[k - 1] = {torus.negate(psum), 0};

                Complex acc = 0.0;
                for (int m = 1; m <= 3; ++m) {
                    double fact = 1.0;
                    for (int i = 2; i <= m; ++i) fact *= i;
                    for (const auto& tree : trees_of_size(m)) {
                        if (trees::branch_excess(tree) > b) continue;
                        for (const auto& n : leg_assignments(tree, 4)) {
                            bool even_only = true;
                            int total = 0;
                            for (int l = 1; l <= m; ++l) {
                                even_only = even_only && n[l] % 2 == 0;
                                total += n[l];
                            }
                            if (!even_only || total - 2 * (m - 1) != k) continue;
                            auto rooted = trees::root_tree(tree, 1);
                            std::vector<const grassmann::InteractionKernel*> kptr(m + 1, nullptr);
                            for (int l = 1; l <= m; ++l) kptr[l] = &kernels.at(n[l]);
                            amplitude::AmplitudeProblem problem(rooted, n, &cov, kptr, legs);
                            acc += amplitude::kernel_hat_A(problem) / fact;
                        }
                    }
                }
                sup_wk = std::max(sup_wk, std::abs(acc));
                int d = k - 2;
                while (d >= 0 && odo[d] == sites - 1) odo[d--] = 0;
                if (d < 0) break;
                odo[d]++;
            }

            CorollaryCheck check;
            check.k = k;
            check.b = b;
            check.coupling = eff.total;
            check.lhs = norms.sup_hat * std::pow(norms.l1_hat, 0.5 * k - 1.0) * 8.0 /
                        std::exp(1.0) * std::pow(4.0 * std::exp(double(b) + 0.5), double(k)) *
                        sup_wk;
            if (eff.summable) {
                check.rhs = bounds::corollary_output_bound(eff, b, k);
                check.pass = check.lhs <= check.rhs;
            } else {
                check.rhs = std::numeric_limits<double>::quiet_NaN();
                check.pass = false;  // |W| >= 1: the bound is undefined, flag the run
            }
            out.push_back(check);
        }
    }
    return out;
}

std::string ScalingReport::csv() const {
    std::ostringstream os;
    os << "j,sup_hat,l1_hat,l1_pos,grad_sup,grad_l1,frak_c\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& n = norms[i];
        os << j[i] << "," << n.sup_hat << "," << n.l1_hat << "," << n.l1_pos << "," << n.grad_sup
           << "," << n.grad_l1 << "," << bounds::frak_c(n) << "\n";
    }
    return os.str();
}

ScalingReport run_scaling(const RunConfig& config) {
    if (config.j_max - config.j_min + 1 < 3)
        throw std::invalid_argument("scaling: need a j range of length >= 3");
    int required = bounds::required_resolution(config.M, config.j_max);
    if (config.scaling_points < required)
        throw std::runtime_error("scaling: resolution insufficient for the M^-" +
                                 std::to_string(config.j_max) + " shell; need at least " +
                                 std::to_string(required) + " points per axis");

    ScalingReport rep;
    for (int j = config.j_min; j <= config.j_max; ++j) {
        bounds::ScaleModel model{config.M, j, config.d, config.scaling_points};
        auto cov = bounds::build_single_scale(model);
        rep.j.push_back(j);
        rep.norms.push_back(bounds::covariance_norms(cov));
    }
    rep.fit = bounds::power_counting_fit(rep.j, rep.norms, config.M);

    std::vector<double> sup, l1;
    for (int j = config.j_min; j <= config.j_max; ++j) {
        auto cov = bounds::synthetic_scale_covariance(config.synthetic_points, config.M, j);
        auto n = bounds::covariance_norms(cov);
        sup.push_back(n.sup_hat);
        l1.push_back(n.l1_hat);
    }
    rep.synthetic_sup = bounds::fit_log_slope(rep.j, sup, config.M);
    rep.synthetic_l1 = bounds::fit_log_slope(rep.j, l1, config.M);
    return rep;
}

int default_threads() {
    if (const char* env = std::getenv("FERMITREE_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

}  // namespace suites
}  // namespace fermitree
