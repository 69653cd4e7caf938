#include "fermitree/exterior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace fermitree {
namespace exterior {

Form Form::monomial(int universe, Mask mask, Complex coeff) {
    Form f(universe);
    if (std::abs(coeff) > 0.0) f.terms_.push_back({mask, coeff});
    return f;
}

Form Form::scalar(int universe, Complex c) { return monomial(universe, 0, c); }

Form Form::one_form(const std::vector<Complex>& coeffs) {
    Form f(static_cast<int>(coeffs.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (std::abs(coeffs[i]) > 0.0) f.terms_.push_back({Mask{1} << i, coeffs[i]});
    return f;
}

Complex Form::coeff(Mask mask) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                               [](const Term& t, Mask m) { return t.mask < m; });
    if (it != terms_.end() && it->mask == mask) return it->coeff;
    return {};
}

int Form::degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, std::popcount(t.mask));
    return d;
}

bool Form::homogeneous(int k) const {
    for (const auto& t : terms_)
        if (std::popcount(t.mask) != k) return false;
    return true;
}

Form& Form::operator+=(const Form& other) {
    if (universe_ != other.universe_)
        throw std::invalid_argument("Form: universe mismatch in +=");
    for (const auto& t : other.terms_) staged_.push_back(t);
    compact();
    return *this;
}

Form& Form::operator*=(Complex c) {
    compact();
    for (auto& t : terms_) t.coeff *= c;
    prune();
    return *this;
}

void Form::compact() {
    if (staged_.empty()) return;
    for (const auto& t : terms_) staged_.push_back(t);
    terms_.clear();
    std::sort(staged_.begin(), staged_.end(),
              [](const Term& a, const Term& b) { return a.mask < b.mask; });
    for (const auto& t : staged_) {
        if (!terms_.empty() && terms_.back().mask == t.mask)
            terms_.back().coeff += t.coeff;
        else
            terms_.push_back(t);
    }
    staged_.clear();
    prune();
}

void Form::prune(double threshold) {
    std::erase_if(terms_, [threshold](const Term& t) { return std::abs(t.coeff) <= threshold; });
}

double Form::distance(const Form& other) const {
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < other.terms_.size()) {
        if (j == other.terms_.size() ||
            (i < terms_.size() && terms_[i].mask < other.terms_[j].mask)) {
            d = std::max(d, std::abs(terms_[i].coeff));
            ++i;
        } else if (i == terms_.size() || other.terms_[j].mask < terms_[i].mask) {
            d = std::max(d, std::abs(other.terms_[j].coeff));
            ++j;
        } else {
            d = std::max(d, std::abs(terms_[i].coeff - other.terms_[j].coeff));
            ++i, ++j;
        }
    }
    return d;
}

int wedge_sign(Form::Mask present, Form::Mask incoming) {
    // Count pairs (a in present, b in incoming) with a > b.
    int crossings = 0;
    Form::Mask b = incoming;
    while (b) {
        int bit = std::countr_zero(b);
        b &= b - 1;
        Form::Mask above = (bit == 63) ? 0 : (~Form::Mask{0} << (bit + 1));
        crossings += std::popcount(present & above);
    }
    return (crossings & 1) ? -1 : 1;
}

Form wedge(const Form& a, const Form& b) {
    if (a.universe() != b.universe())
        throw std::invalid_argument("wedge: universe mismatch");
    Form out(a.universe());
    for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) {
            if (ta.mask & tb.mask) continue;
            int sign = wedge_sign(ta.mask, tb.mask);
            out.accumulate(ta.mask | tb.mask, double(sign) * ta.coeff * tb.coeff);
        }
    }
    out.compact();
    return out;
}

double lp_norm(const Form& a, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p < 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& t : a.terms()) m = std::max(m, std::abs(t.coeff));
        return m;
    }
    double s = 0.0;
    for (const auto& t : a.terms()) s += std::pow(std::abs(t.coeff), p);
    return std::pow(s, 1.0 / p);
}

Complex top_integral(const Form& a) {
    if (a.universe() == 0) return a.coeff(0);
    Form::Mask full = (a.universe() >= 64) ? ~Form::Mask{0}
                                           : ((Form::Mask{1} << a.universe()) - 1);
    return a.coeff(full);
}

Form interior_product(const Form& v, const Form& a) {
    if (!v.homogeneous(1) || v.empty())
        throw std::invalid_argument("interior_product: v must be a one-form");
    Form out(a.universe());
    for (const auto& t : a.terms()) {
        for (const auto& tv : v.terms()) {
            if (!(t.mask & tv.mask)) continue;
            int bit = std::countr_zero(tv.mask);
            int below = std::popcount(t.mask & ((Form::Mask{1} << bit) - 1));
            double sign = (below & 1) ? -1.0 : 1.0;
            out.accumulate(t.mask ^ tv.mask, sign * std::conj(tv.coeff) * t.coeff);
        }
    }
    out.compact();
    return out;
}

double shuffle_bound(const std::vector<int>& degrees, double p) {
    if (degrees.empty()) throw std::invalid_argument("shuffle_bound: empty degree list");
    if (p < 1.0) throw std::invalid_argument("shuffle_bound: p < 1");
    // multinomial(k; k_1..k_n) as a product of binomials
    double multinomial = 1.0;
    long long k = 0;
    for (int ki : degrees) {
        if (ki < 0) throw std::invalid_argument("shuffle_bound: negative degree");
        for (long long i = 1; i <= ki; ++i) {
            ++k;
            multinomial *= double(k) / double(i);
        }
    }
    double expo = std::isinf(p) ? 1.0 : (p - 1.0) / p;
    return std::pow(multinomial, expo);
}

}  // namespace exterior
}  // namespace fermitree
