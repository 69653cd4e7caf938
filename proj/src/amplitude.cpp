#include "fermitree/amplitude.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace fermitree {
namespace amplitude {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

int list_sign(std::span<const int> seq) {
    int inv = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (seq[i] > seq[j]) ++inv;
    return (inv & 1) ? -1 : 1;
}

}  // namespace

LegLayout make_leg_layout(const trees::RootedTree& rt, const std::vector<int>& n_per_vertex) {
    const int m = rt.vertex_count();
    LegLayout out;
    out.first.assign(m + 1, 0);
    out.count.assign(m + 1, 0);
    for (int l = 1; l <= m; ++l) {
        int c = n_per_vertex[l] - rt.degree[l];
        if (c < 0) throw std::invalid_argument("make_leg_layout: n_l < d^T(l)");
        out.first[l] = static_cast<int>(out.slots.size());
        out.count[l] = c;
        for (int k = 1; k <= c; ++k) out.slots.emplace_back(l, k);
    }
    // recursion wedge order: children (increasing label) first, then own legs
    std::function<void(int)> visit = [&](int l) {
        for (int c : rt.children[l]) visit(c);
        for (int k = 0; k < out.count[l]; ++k) out.traversal.push_back(out.first[l] + k);
    };
    visit(rt.root);
    out.traversal_sign = list_sign(out.traversal);
    return out;
}

AmplitudeProblem::AmplitudeProblem(trees::RootedTree rt_, std::vector<int> n_per_vertex_,
                                   const grassmann::Covariance* cov,
                                   std::vector<const grassmann::InteractionKernel*> kernels_,
                                   std::vector<Leg> external_)
    : rt(std::move(rt_)), n_per_vertex(std::move(n_per_vertex_)), covariance(cov),
      kernels(std::move(kernels_)), external(std::move(external_)) {
    const int m = rt.vertex_count();
    if (static_cast<int>(n_per_vertex.size()) != m + 1)
        throw std::invalid_argument("AmplitudeProblem: n_per_vertex must be 1-based of size m+1");
    layout = make_leg_layout(rt, n_per_vertex);
    if (static_cast<int>(external.size()) != layout.total())
        throw std::invalid_argument("AmplitudeProblem: external leg count != n(n,m)");
    if (static_cast<int>(kernels.size()) != m + 1)
        throw std::invalid_argument("AmplitudeProblem: kernels must be 1-based of size m+1");
    for (int l = 1; l <= m; ++l) {
        if (!kernels[l] || kernels[l]->arity() != n_per_vertex[l])
            throw std::invalid_argument("AmplitudeProblem: kernel arity mismatch");
        if (kernels[l]->spins() != covariance->spins())
            throw std::invalid_argument("AmplitudeProblem: spin count mismatch");
    }
    subtree_slots.assign(m + 1, {});
    for (int v = 1; v <= m; ++v) {
        if (v == rt.root) continue;
        for (int s = 0; s < layout.total(); ++s) {
            int vertex = layout.slots[s].first;
            if (rt.subtree[v] & (std::uint32_t{1} << (vertex - 1))) subtree_slots[v].push_back(s);
        }
    }
}

int AmplitudeProblem::mask_momentum(Form::Mask mask) const {
    int p = 0;
    while (mask) {
        int slot = std::countr_zero(mask);
        mask &= mask - 1;
        p = torus().add(p, external[slot].p_flat);
    }
    return p;
}

bool AmplitudeProblem::momentum_conserving() const {
    int p = 0;
    for (const auto& leg : external) p = torus().add(p, leg.p_flat);
    return p == 0;
}

void for_each_spin_assignment(const AmplitudeProblem& p,
                              const std::function<void(const SpinAssignment&)>& fn) {
    const int m = p.rt.vertex_count();
    const int spins = p.spins();
    std::vector<int> lines;  // non-root vertices
    for (int l = 1; l <= m; ++l)
        if (l != p.rt.root) lines.push_back(l);

    SpinAssignment sa;
    sa.line.assign(m + 1, {0, 0});
    sa.slot.assign(p.layout.total(), 0);

    const int digits = static_cast<int>(2 * lines.size()) + p.layout.total();
    std::vector<int> odo(digits, 0);
    while (true) {
        for (std::size_t i = 0; i < lines.size(); ++i)
            sa.line[lines[i]] = {odo[2 * i], odo[2 * i + 1]};
        for (int s = 0; s < p.layout.total(); ++s)
            sa.slot[s] = odo[2 * lines.size() + s];
        fn(sa);
        int d = digits - 1;
        while (d >= 0 && odo[d] == spins - 1) odo[d--] = 0;
        if (d < 0) break;
        odo[d]++;
    }
}

Form fundamental_form(const AmplitudeProblem& p, const SpinAssignment& sa, int slot,
                      const Interpolation* interp) {
    Form out(p.layout.total());
    const int want = sa.slot[slot];
    for (int s2 = 0; s2 < p.layout.total(); ++s2) {
        if (p.external[s2].sigma != want) continue;
        Complex c = 1.0;
        if (interp) {
            int i = slot / 2;
            int target_vertex = p.layout.slots[s2].first;
            double entry = interp->a(interp->k[i] - 1, target_vertex - 1);
            c = (slot % 2 == 0) ? std::conj(Complex(entry)) : Complex(entry);
        }
        out.accumulate(Form::Mask{1} << s2, c);
    }
    out.compact();
    return out;
}

Form apply_c(const AmplitudeProblem& p, const SpinAssignment& sa, int vertex, const Form& a) {
    auto [s, s2] = sa.line[vertex];
    Form out(a.universe());
    for (const auto& t : a.terms())
        out.accumulate(t.mask, t.coeff * p.covariance->hat(s, s2, p.mask_momentum(t.mask)));
    out.compact();
    return out;
}

Form apply_w(const AmplitudeProblem& p, const SpinAssignment& sa, int vertex,
             std::span<const Form> child_forms, std::span<const Form> leg_forms) {
    const auto& children = p.rt.children[vertex];
    const bool has_parent = vertex != p.rt.root;
    const int n_children = static_cast<int>(children.size());
    const int n_legs = p.layout.count[vertex];
    if (static_cast<int>(child_forms.size()) != n_children ||
        static_cast<int>(leg_forms.size()) != n_legs)
        throw std::invalid_argument("apply_w: arity mismatch");

    const auto& kernel = *p.kernels[vertex];
    const int n_inputs = n_children + n_legs;
    Form out(p.layout.total());
    if (n_inputs == 0) {
        // degree-1 vertex carrying only its own line
        std::array<int, 1> arg = {kernel.point(0, sa.line[vertex].second)};
        return Form::scalar(p.layout.total(), kernel.value(arg));
    }
    for (const auto& f : child_forms)
        if (f.empty()) return out;
    for (const auto& f : leg_forms)
        if (f.empty()) return out;

    std::vector<const Form*> inputs;
    for (const auto& f : child_forms) inputs.push_back(&f);
    for (const auto& f : leg_forms) inputs.push_back(&f);

    std::vector<std::size_t> pick(n_inputs, 0);
    std::vector<int> args(has_parent ? n_inputs + 1 : n_inputs);
    while (true) {
        Form::Mask mask = 0;
        int sign = 1;
        Complex coeff = 1.0;
        int total_p = 0;
        bool ok = true;
        for (int i = 0; i < n_inputs && ok; ++i) {
            const auto& term = inputs[i]->terms()[pick[i]];
            if (mask & term.mask) {
                ok = false;
                break;
            }
            sign *= exterior::wedge_sign(mask, term.mask);
            mask |= term.mask;
            coeff *= term.coeff;
            int pi = p.mask_momentum(term.mask);
            total_p = p.torus().add(total_p, pi);
            int sigma = (i < n_children) ? sa.line[children[i]].first
                                         : sa.slot[p.layout.first[vertex] + (i - n_children)];
            args[(has_parent ? 1 : 0) + i] = kernel.point(pi, sigma);
        }
        if (ok) {
            if (has_parent)
                args[0] = kernel.point(p.torus().negate(total_p), sa.line[vertex].second);
            Complex w = kernel.value(args);
            if (w != Complex{}) out.accumulate(mask, double(sign) * coeff * w);
        }
        int d = n_inputs - 1;
        while (d >= 0 && pick[d] + 1 == inputs[d]->terms().size()) pick[d--] = 0;
        if (d < 0) break;
        pick[d]++;
    }
    out.compact();
    return out;
}

Form recurse_alpha(const AmplitudeProblem& p, const SpinAssignment& sa,
                   const Interpolation* interp) {
    std::vector<Form> at_vertex(p.rt.vertex_count() + 1);
    for (int v : p.rt.postorder) {
        std::vector<Form> child_forms;
        for (int c : p.rt.children[v]) child_forms.push_back(std::move(at_vertex[c]));
        std::vector<Form> leg_forms;
        for (int k = 0; k < p.layout.count[v]; ++k)
            leg_forms.push_back(fundamental_form(p, sa, p.layout.first[v] + k, interp));
        Form f = apply_w(p, sa, v, child_forms, leg_forms);
        if (v != p.rt.root) f = apply_c(p, sa, v, f);
        at_vertex[v] = std::move(f);
    }
    return at_vertex[p.rt.root];
}

Form oracle_direct_alpha(const AmplitudeProblem& p, const SpinAssignment& sa,
                         const Interpolation* interp) {
    const int n = p.layout.total();
    const int m = p.rt.vertex_count();
    Form out(n);

    std::vector<std::vector<int>> candidates(n);
    for (int s = 0; s < n; ++s) {
        for (int s2 = 0; s2 < n; ++s2)
            if (p.external[s2].sigma == sa.slot[s]) candidates[s].push_back(s2);
        if (candidates[s].empty()) return out;
    }
    const auto& sub_slots = p.subtree_slots;

    std::vector<std::size_t> pick(n, 0);
    std::vector<int> assign(n, 0);
    std::vector<int> args;
    while (true) {
        for (int s = 0; s < n; ++s) assign[s] = candidates[s][pick[s]];

        // wedge of e_{assign[traversal_j]} in traversal order
        Form::Mask mask = 0;
        int sign = 1;
        bool nonzero = true;
        for (int j = 0; j < n && nonzero; ++j) {
            Form::Mask bit = Form::Mask{1} << assign[p.layout.traversal[j]];
            if (mask & bit)
                nonzero = false;
            else {
                sign *= exterior::wedge_sign(mask, bit);
                mask |= bit;
            }
        }
        if (nonzero) {
            Complex coeff = 1.0;
            // line momenta at assigned indices, covariance factors
            std::vector<int> line_p(m + 1, 0);
            for (int v = 1; v <= m && coeff != Complex{}; ++v) {
                if (v == p.rt.root) continue;
                int lp = 0;
                for (int s : sub_slots[v]) lp = p.torus().add(lp, p.external[assign[s]].p_flat);
                line_p[v] = lp;
                auto [ls, ls2] = sa.line[v];
                coeff *= p.covariance->hat(ls, ls2, lp);
            }
            // kernel factors in the frozen argument order
            for (int v = 1; v <= m && coeff != Complex{}; ++v) {
                const auto& kernel = *p.kernels[v];
                args.clear();
                if (v != p.rt.root)
                    args.push_back(kernel.point(p.torus().negate(line_p[v]), sa.line[v].second));
                for (int c : p.rt.children[v])
                    args.push_back(kernel.point(line_p[c], sa.line[c].first));
                for (int k = 0; k < p.layout.count[v]; ++k) {
                    int slot = p.layout.first[v] + k;
                    args.push_back(kernel.point(p.external[assign[slot]].p_flat, sa.slot[slot]));
                }
                coeff *= kernel.value(args);
            }
            if (interp && coeff != Complex{}) {
                for (int s = 0; s < n; ++s) {
                    int i = s / 2;
                    double entry =
                        interp->a(interp->k[i] - 1, p.layout.slots[assign[s]].first - 1);
                    coeff *= (s % 2 == 0) ? std::conj(Complex(entry)) : Complex(entry);
                }
            }
            if (coeff != Complex{}) out.accumulate(mask, double(sign) * coeff);
        }

        int d = n - 1;
        while (d >= 0 && pick[d] + 1 == candidates[d].size()) pick[d--] = 0;
        if (d < 0) break;
        pick[d]++;
    }
    out.compact();
    return out;
}

Complex oracle_direct_kernel(const AmplitudeProblem& p, std::span<const Leg> lambda) {
    const int n = p.layout.total();
    const int m = p.rt.vertex_count();
    if (static_cast<int>(lambda.size()) != n)
        throw std::invalid_argument("oracle_direct_kernel: wrong lambda count");

    int total = 0;
    for (const auto& leg : lambda) total = p.torus().add(total, leg.p_flat);
    if (total != 0) return 0.0;

    std::vector<int> line_p(m + 1, 0);
    for (int v = 1; v <= m; ++v) {
        if (v == p.rt.root) continue;
        int lp = 0;
        for (int s : p.subtree_slots[v]) lp = p.torus().add(lp, lambda[s].p_flat);
        line_p[v] = lp;
    }

    std::vector<int> lines;
    for (int v = 1; v <= m; ++v)
        if (v != p.rt.root) lines.push_back(v);
    const int spins = p.spins();

    Complex sum = 0.0;
    std::vector<int> odo(2 * lines.size(), 0);
    std::vector<std::pair<int, int>> line_spin(m + 1, {0, 0});
    std::vector<int> args;
    while (true) {
        for (std::size_t i = 0; i < lines.size(); ++i)
            line_spin[lines[i]] = {odo[2 * i], odo[2 * i + 1]};
        Complex coeff = 1.0;
        for (int v : lines) coeff *= p.covariance->hat(line_spin[v].first, line_spin[v].second, line_p[v]);
        for (int v = 1; v <= m && coeff != Complex{}; ++v) {
            const auto& kernel = *p.kernels[v];
            args.clear();
            if (v != p.rt.root)
                args.push_back(kernel.point(p.torus().negate(line_p[v]), line_spin[v].second));
            for (int c : p.rt.children[v]) args.push_back(kernel.point(line_p[c], line_spin[c].first));
            for (int k = 0; k < p.layout.count[v]; ++k) {
                int slot = p.layout.first[v] + k;
                args.push_back(kernel.point(lambda[slot].p_flat, lambda[slot].sigma));
            }
            coeff *= kernel.value(args);
        }
        sum += coeff;
        int d = static_cast<int>(odo.size()) - 1;
        while (d >= 0 && odo[d] == spins - 1) odo[d--] = 0;
        if (d < 0) break;
        odo[d]++;
    }

    double pref = 1.0;
    for (int l = 1; l <= m; ++l)
        pref *= factorial(p.n_per_vertex[l]) / factorial(p.layout.count[l]);
    return double(p.layout.traversal_sign) * pref * sum;
}

namespace {

// The vertex map with its slot-spin sums carried out: summing the doubled
// leg spin sigma'_(l,k) against the fundamental-form filter replaces every
// leg argument by (p_iota, sigma_iota) of the picked basis vector, so each
// leg contributes the full one-form over I. Children arrive as spin-resolved
// forms with the spin of their line as kernel argument.
Form vertex_w_sum(const AmplitudeProblem& p, int vertex, int parent_spin,
                  std::span<const std::pair<const Form*, int>> children) {
    const auto& kernel = *p.kernels[vertex];
    const int n_children = static_cast<int>(children.size());
    const int n_legs = p.layout.count[vertex];
    const int n = p.layout.total();
    const bool has_parent = parent_spin >= 0;

    Form out(n);
    for (const auto& [f, spin] : children)
        if (f->empty()) return out;

    const int n_inputs = n_children + n_legs;
    if (n_inputs == 0) {
        std::array<int, 1> arg = {kernel.point(0, parent_spin)};
        return Form::scalar(n, kernel.value(arg));
    }

    std::vector<std::size_t> pick(n_inputs, 0);
    std::vector<std::size_t> radix(n_inputs);
    for (int i = 0; i < n_children; ++i) radix[i] = children[i].first->terms().size();
    for (int i = n_children; i < n_inputs; ++i) radix[i] = static_cast<std::size_t>(n);
    std::vector<int> args(has_parent ? n_inputs + 1 : n_inputs);
    while (true) {
        Form::Mask mask = 0;
        int sign = 1;
        Complex coeff = 1.0;
        int total_p = 0;
        bool ok = true;
        for (int i = 0; i < n_inputs && ok; ++i) {
            Form::Mask tmask;
            Complex tcoeff;
            int arg_p, arg_sigma;
            if (i < n_children) {
                const auto& term = children[i].first->terms()[pick[i]];
                tmask = term.mask;
                tcoeff = term.coeff;
                arg_p = p.mask_momentum(term.mask);
                arg_sigma = children[i].second;
            } else {
                int slot = static_cast<int>(pick[i]);
                tmask = Form::Mask{1} << slot;
                tcoeff = 1.0;
                arg_p = p.external[slot].p_flat;
                arg_sigma = p.external[slot].sigma;
            }
            if (mask & tmask) {
                ok = false;
                break;
            }
            sign *= exterior::wedge_sign(mask, tmask);
            mask |= tmask;
            coeff *= tcoeff;
            total_p = p.torus().add(total_p, arg_p);
            args[(has_parent ? 1 : 0) + i] = kernel.point(arg_p, arg_sigma);
        }
        if (ok) {
            if (has_parent) args[0] = kernel.point(p.torus().negate(total_p), parent_spin);
            Complex w = kernel.value(args);
            if (w != Complex{}) out.accumulate(mask, double(sign) * coeff * w);
        }
        int d = n_inputs - 1;
        while (d >= 0 && pick[d] + 1 == radix[d]) pick[d--] = 0;
        if (d < 0) break;
        pick[d]++;
    }
    out.compact();
    return out;
}

}  // namespace

Complex kernel_hat_A(const AmplitudeProblem& p) {
    if (!p.momentum_conserving()) return 0.0;
    const int n = p.layout.total();
    const int m = p.rt.vertex_count();
    const int spins = p.spins();

    // The spin sums factor along the tree: every line spin pair couples one
    // covariance index to one kernel argument at each end, and every doubled
    // leg spin couples a fundamental-form filter to one kernel argument, so
    // the global sum collapses to per-vertex sums over small spin tables.
    // g[v][sigma] sums everything strictly below the line {v, Pi(v)} with
    // the line's kernel-argument spin at the parent fixed to sigma.
    std::vector<std::vector<Form>> g(m + 1);
    Form root_form(n);
    std::vector<std::pair<const Form*, int>> children;
    for (int v : p.rt.postorder) {
        const auto& child_list = p.rt.children[v];
        const int n_children = static_cast<int>(child_list.size());
        const bool is_root = v == p.rt.root;

        auto sum_over_child_spins = [&](int parent_spin) {
            Form acc(n);
            std::vector<int> combo(n_children, 0);
            while (true) {
                children.clear();
                for (int c = 0; c < n_children; ++c)
                    children.emplace_back(&g[child_list[c]][combo[c]], combo[c]);
                acc += vertex_w_sum(p, v, parent_spin, children);
                int d = n_children - 1;
                while (d >= 0 && combo[d] == spins - 1) combo[d--] = 0;
                if (d < 0) break;
                combo[d]++;
            }
            return acc;
        };

        if (is_root) {
            root_form = sum_over_child_spins(-1);
        } else {
            // inner[s'] = sum over child line spins of W_v with first-arg
            // spin s'; then contract the line covariance indices
            std::vector<Form> inner(spins, Form(n));
            for (int s2 = 0; s2 < spins; ++s2) inner[s2] = sum_over_child_spins(s2);
            g[v].assign(spins, Form(n));
            for (int s = 0; s < spins; ++s) {
                Form acc(n);
                for (int s2 = 0; s2 < spins; ++s2)
                    for (const auto& t : inner[s2].terms())
                        acc.accumulate(t.mask,
                                       t.coeff * p.covariance->hat(s, s2, p.mask_momentum(t.mask)));
                acc.compact();
                g[v][s] = std::move(acc);
            }
        }
        for (int c : child_list) g[c].clear();
    }

    double pref = 1.0;
    for (int l = 1; l <= m; ++l)
        pref *= factorial(p.n_per_vertex[l]) / factorial(p.layout.count[l]);
    return pref / factorial(n) * exterior::top_integral(root_form);
}

Complex kernel_antisymmetrization_oracle(const AmplitudeProblem& p) {
    const int n = p.layout.total();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Leg> permuted(n);
    Complex sum = 0.0;
    do {
        for (int i = 0; i < n; ++i) permuted[i] = p.external[perm[i]];
        sum += double(list_sign(perm)) * oracle_direct_kernel(p, permuted);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum / factorial(n);
}

Complex tree_amplitude_value(const AmplitudeProblem& p) {
    const int n = p.layout.total();
    if (n % 2 == 1) return 0.0;
    const int half = n / 2;
    const int sites = static_cast<int>(p.torus().sites());
    const int spins = p.spins();

    AmplitudeProblem work = p;
    Complex sum = 0.0;
    // one loop variable per pair: (p_i, sigma_i, sigma_i')
    std::vector<int> odo(3 * half, 0);
    std::vector<int> radix(3 * half);
    for (int i = 0; i < half; ++i) {
        radix[3 * i] = sites;
        radix[3 * i + 1] = spins;
        radix[3 * i + 2] = spins;
    }
    while (true) {
        Complex weight = 1.0;
        for (int i = 0; i < half; ++i) {
            int pf = odo[3 * i], s = odo[3 * i + 1], s2 = odo[3 * i + 2];
            work.external[2 * i] = {pf, s};
            work.external[2 * i + 1] = {p.torus().negate(pf), s2};
            weight *= p.covariance->hat(s, s2, pf);
        }
        if (weight != Complex{}) sum += weight * kernel_hat_A(work);
        int d = 3 * half - 1;
        while (d >= 0 && odo[d] == radix[d] - 1) odo[d--] = 0;
        if (d < 0) break;
        odo[d]++;
    }

    const double vol = double(sites);
    double pairing = factorial(n) / (std::pow(2.0, half) * factorial(half));
    return vol * pairing * std::pow(vol, -half) * sum;
}

Complex tree_amplitude_grassmann(const AmplitudeProblem& p) {
    const int n = p.layout.total();
    if (n % 2 == 1) return 0.0;
    const int sites = static_cast<int>(p.torus().sites());
    const int spins = p.spins();
    const int points = sites * spins;

    // hat A' over all slot argument tuples
    grassmann::DenseKernel hat(n, points);
    std::vector<int> odo(n, 0);
    std::vector<Leg> lambda(n);
    std::size_t flat = 0;
    while (true) {
        for (int i = 0; i < n; ++i) lambda[i] = {odo[i] / spins, odo[i] % spins};
        hat.values[flat] = oracle_direct_kernel(p, lambda);
        ++flat;
        int d = n - 1;
        while (d >= 0 && odo[d] == points - 1) odo[d--] = 0;
        if (d < 0) break;
        odo[d]++;
    }

    // psi polynomial: |T|^(1-n) sum_lambda hat A'(lambda) /\ psihat(lambda_s)
    grassmann::DenseKernel pos = grassmann::position_from_hat_slotwise(p.torus(), spins, hat);
    grassmann::GrassmannPoly poly(points);
    std::fill(odo.begin(), odo.end(), 0);
    flat = 0;
    while (true) {
        Complex coeff = double(sites) * pos.values[flat];
        if (std::abs(coeff) > kPruneThreshold) {
            Form::Mask mask = 0;
            int sign = 1;
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) {
                Form::Mask bit = Form::Mask{1} << odo[i];
                if (mask & bit)
                    ok = false;
                else {
                    sign *= exterior::wedge_sign(mask, bit);
                    mask |= bit;
                }
            }
            if (ok) poly.accumulate(mask, double(sign) * coeff);
        }
        ++flat;
        int d = n - 1;
        while (d >= 0 && odo[d] == points - 1) odo[d--] = 0;
        if (d < 0) break;
        odo[d]++;
    }
    poly.compact();
    return grassmann::gaussian_integral(poly, p.covariance->position_matrix());
}

Form RankOneSuperposition::sum() const {
    Form out(universe);
    for (const auto& t : terms) {
        Form w = Form::scalar(universe, t.weight);
        for (const auto& f : t.factors) w = exterior::wedge(w, f);
        out += w;
    }
    return out;
}

double RankOneSuperposition::l1_rank1_norm() const {
    double s = 0.0;
    for (const auto& t : terms) {
        double prod = std::abs(t.weight);
        for (const auto& f : t.factors) prod *= exterior::lp_norm(f, 2.0);
        s += prod;
    }
    return s;
}

namespace {

void require_one_forms(std::span<const Form> factors, const char* where) {
    for (const auto& f : factors)
        if (!f.homogeneous(1))
            throw std::invalid_argument(std::string(where) + ": factor is not a one-form");
}

// E(x)[v]: multiply each basis coefficient by exp(i x . p_slot)
Form phase_modulate(const AmplitudeProblem& p, const Form& v, int x_flat) {
    Form out(v.universe());
    for (const auto& t : v.terms()) {
        int slot = std::countr_zero(t.mask);
        double ph = p.torus().phase(p.external[slot].p_flat, x_flat);
        out.accumulate(t.mask, t.coeff * std::polar(1.0, ph));
    }
    out.compact();
    return out;
}

}  // namespace

RankOneSuperposition fourier_decompose_c(const AmplitudeProblem& p, const SpinAssignment& sa,
                                         int vertex, std::span<const Form> rank1_factors) {
    require_one_forms(rank1_factors, "fourier_decompose_c");
    auto [s, s2] = sa.line[vertex];
    RankOneSuperposition out;
    out.universe = p.layout.total();
    const int sites = static_cast<int>(p.torus().sites());
    for (int x = 0; x < sites; ++x) {
        Complex w = p.covariance->position(s, s2, x);
        if (std::abs(w) <= kPruneThreshold) continue;
        RankOneSuperposition::Term term;
        term.weight = w;
        for (const auto& f : rank1_factors) term.factors.push_back(phase_modulate(p, f, x));
        out.terms.push_back(std::move(term));
    }
    return out;
}

RankOneSuperposition fourier_decompose_w(const AmplitudeProblem& p, const SpinAssignment& sa,
                                         int vertex,
                                         std::span<const std::vector<Form>> child_factors,
                                         std::span<const Form> leg_forms) {
    for (const auto& group : child_factors) require_one_forms(group, "fourier_decompose_w");
    require_one_forms(leg_forms, "fourier_decompose_w");

    const auto& children = p.rt.children[vertex];
    const bool has_parent = vertex != p.rt.root;
    const int n_children = static_cast<int>(children.size());
    const int n_legs = p.layout.count[vertex];
    if (static_cast<int>(child_factors.size()) != n_children ||
        static_cast<int>(leg_forms.size()) != n_legs)
        throw std::invalid_argument("fourier_decompose_w: arity mismatch");

    const auto& kernel = *p.kernels[vertex];
    grassmann::DenseKernel wpos = kernel.position_kernel();
    const int sites = static_cast<int>(p.torus().sites());
    const int n_args = (has_parent ? 1 : 0) + n_children + n_legs;

    RankOneSuperposition out;
    out.universe = p.layout.total();

    std::vector<int> pos(n_args, 0);
    std::vector<int> args(n_args, 0);
    while (true) {
        // argument spins follow the frozen order; position of argument i is pos[i]
        int a = 0;
        if (has_parent) args[a] = kernel.point(pos[a], sa.line[vertex].second), ++a;
        for (int c = 0; c < n_children; ++c)
            args[a] = kernel.point(pos[a], sa.line[children[c]].first), ++a;
        for (int k = 0; k < n_legs; ++k)
            args[a] = kernel.point(pos[a], sa.slot[p.layout.first[vertex] + k]), ++a;
        Complex w = wpos.value(args);
        if (std::abs(w) > kPruneThreshold) {
            // relative phases (x_arg - x_0) against the parent position, or
            // absolute positions at the root
            int x0 = has_parent ? pos[0] : 0;
            RankOneSuperposition::Term term;
            term.weight = w;
            int base = has_parent ? 1 : 0;
            for (int c = 0; c < n_children; ++c) {
                int rel = p.torus().add(pos[base + c], p.torus().negate(x0));
                for (const auto& f : child_factors[c])
                    term.factors.push_back(phase_modulate(p, f, rel));
            }
            for (int k = 0; k < n_legs; ++k) {
                int rel = p.torus().add(pos[base + n_children + k], p.torus().negate(x0));
                term.factors.push_back(phase_modulate(p, leg_forms[k], rel));
            }
            out.terms.push_back(std::move(term));
        }
        int d = n_args - 1;
        while (d >= 0 && pos[d] == sites - 1) pos[d--] = 0;
        if (d < 0) break;
        pos[d]++;
    }
    return out;
}

IbpResult ibp_apply(std::span<const Complex> c_window, int t_min,
                    std::span<const int> leg_momenta, const Form& a_rank1,
                    const Form& a_prime) {
    const int size = static_cast<int>(c_window.size());
    const int t_max = t_min + size - 1;
    if (size < 3) throw std::invalid_argument("ibp_apply: window too small");
    if (std::abs(c_window.front()) > 0.0 || std::abs(c_window.back()) > 0.0)
        throw std::invalid_argument("ibp_apply: support touches the domain boundary");

    auto chat = [&](long long t) -> Complex {
        if (t < t_min || t > t_max) return {};
        return c_window[static_cast<std::size_t>(t - t_min)];
    };
    auto dchat = [&](long long t) -> Complex { return chat(t + 1) - chat(t); };
    auto momentum = [&](Form::Mask mask) {
        long long s = 0;
        while (mask) {
            s += leg_momenta[std::countr_zero(mask)];
            mask &= mask - 1;
        }
        return s;
    };

    const int universe = a_rank1.universe();
    auto cmul = [&](const Form& f) {
        Form out(universe);
        for (const auto& t : f.terms()) out.accumulate(t.mask, t.coeff * chat(momentum(t.mask)));
        out.compact();
        return out;
    };
    Form lhs = exterior::wedge(cmul(a_rank1), cmul(a_prime));

    Form rhs(universe);
    for (long long t = t_min - 1; t <= t_max; ++t) {
        Complex ct = chat(t), dct = dchat(t);
        if (ct == Complex{} && dct == Complex{}) continue;
        // X(t)[a']: keep a' terms with t < p'
        Form filtered(universe);
        for (const auto& tp : a_prime.terms())
            if (t < momentum(tp.mask)) filtered.accumulate(tp.mask, tp.coeff);
        filtered.compact();
        if (filtered.empty()) continue;
        Form w = exterior::wedge(a_rank1, filtered);
        for (const auto& term : w.terms()) {
            long long q = momentum(term.mask);
            rhs.accumulate(term.mask, term.coeff * (dct * chat(q - t - 1) - ct * dchat(q - t - 1)));
        }
    }
    rhs.compact();

    double c1 = 0.0, dsup = 0.0, d1 = 0.0, csup = 0.0;
    for (long long t = t_min - 1; t <= t_max; ++t) {
        c1 += std::abs(chat(t));
        d1 += std::abs(dchat(t));
        csup = std::max(csup, std::abs(chat(t)));
        dsup = std::max(dsup, std::abs(dchat(t)));
    }
    double frak_c = c1 * dsup + d1 * csup;

    IbpResult res{std::move(lhs), std::move(rhs), 0.0, 0.0, 0.0};
    res.identity_residual = res.lhs.distance(res.rhs);
    res.lhs_l2 = exterior::lp_norm(res.lhs, 2.0);
    res.bound = frak_c * exterior::lp_norm(a_rank1, 2.0) * exterior::lp_norm(a_prime, 2.0);
    return res;
}

}  // namespace amplitude
}  // namespace fermitree
