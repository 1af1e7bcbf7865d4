#include "dirackit/poly.hpp"

#include <sstream>
#include <stdexcept>

namespace dirackit {

PolyExpr PolyExpr::constant(std::size_t nvars, Rational c) {
    PolyExpr p(nvars);
    p.add_term(ExpVec(nvars, 0), c);
    return p;
}

PolyExpr PolyExpr::variable(std::size_t nvars, std::size_t index) {
    if (index >= nvars) throw std::out_of_range("PolyExpr::variable: index out of range");
    ExpVec e(nvars, 0);
    e[index] = 1;
    return monomial(nvars, std::move(e), Rational(1));
}

PolyExpr PolyExpr::monomial(std::size_t nvars, ExpVec exps, Rational c) {
    if (exps.size() != nvars) throw std::invalid_argument("PolyExpr::monomial: exponent length");
    PolyExpr p(nvars);
    p.add_term(exps, c);
    return p;
}

bool PolyExpr::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    for (auto e : terms_.begin()->first)
        if (e != 0) return false;
    return true;
}

std::size_t PolyExpr::degree() const {
    std::size_t d = 0;
    for (const auto& [e, c] : terms_) {
        std::size_t t = 0;
        for (auto x : e) t += x;
        if (t > d) d = t;
    }
    return d;
}

void PolyExpr::add_term(const ExpVec& exps, const Rational& c) {
    if (exps.size() != nvars_) throw std::invalid_argument("PolyExpr::add_term: exponent length");
    if (c.is_zero()) return;
    auto it = terms_.find(exps);
    if (it == terms_.end()) {
        terms_.emplace(exps, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void PolyExpr::check_same_space(const PolyExpr& other) const {
    if (nvars_ != other.nvars_)
        throw std::invalid_argument("PolyExpr: operand variable-count mismatch");
}

PolyExpr PolyExpr::operator-() const {
    PolyExpr r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

PolyExpr operator+(const PolyExpr& a, const PolyExpr& b) {
    a.check_same_space(b);
    PolyExpr r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
}

PolyExpr operator-(const PolyExpr& a, const PolyExpr& b) {
    a.check_same_space(b);
    PolyExpr r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
    return r;
}

PolyExpr operator*(const PolyExpr& a, const PolyExpr& b) {
    a.check_same_space(b);
    PolyExpr r(a.nvars_);
    ExpVec e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

PolyExpr PolyExpr::scaled(const Rational& c) const {
    PolyExpr r(nvars_);
    if (c.is_zero()) return r;
    for (const auto& [e, t] : terms_) r.terms_.emplace(e, t * c);
    return r;
}

PolyExpr PolyExpr::pow(unsigned e) const {
    PolyExpr r = PolyExpr::constant(nvars_, Rational(1));
    PolyExpr base = *this;
    for (unsigned k = e; k;) {
        if (k & 1u) r = r * base;
        k >>= 1u;
        if (k) base = base * base;
    }
    return r;
}

PolyExpr PolyExpr::diff(std::size_t var_index) const {
    if (var_index >= nvars_) throw std::out_of_range("PolyExpr::diff: index out of range");
    PolyExpr r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var_index] == 0) continue;
        ExpVec d = e;
        d[var_index] -= 1;
        r.add_term(d, c * Rational(static_cast<long>(e[var_index])));
    }
    return r;
}

Rational PolyExpr::eval(std::span<const Rational> point) const {
    if (point.size() != nvars_) throw std::invalid_argument("PolyExpr::eval: dimension mismatch");
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (std::size_t i = 0; i < nvars_; ++i)
            if (e[i]) t *= point[i].pow(e[i]);
        acc += t;
    }
    return acc;
}

double PolyExpr::eval(std::span<const double> point) const {
    if (point.size() != nvars_) throw std::invalid_argument("PolyExpr::eval: dimension mismatch");
    double acc = 0;
    for (const auto& [e, c] : terms_) {
        double t = c.to_double();
        for (std::size_t i = 0; i < nvars_; ++i)
            for (std::uint32_t k = 0; k < e[i]; ++k) t *= point[i];
        acc += t;
    }
    return acc;
}

std::string PolyExpr::str(const std::vector<std::string>& names) const {
    if (names.size() != nvars_)
        throw std::invalid_argument("PolyExpr::str: name count mismatch");
    if (terms_.empty()) return "0";

    std::ostringstream out;
    bool first = true;
    // Highest grlex term first.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        const Rational mag = c.abs();
        if (first) {
            if (c.sign() < 0) out << "-";
            first = false;
        } else {
            out << (c.sign() < 0 ? " - " : " + ");
        }
        bool has_vars = false;
        for (auto x : e)
            if (x) { has_vars = true; break; }
        bool coeff_printed = false;
        if (!has_vars || mag != Rational(1)) {
            out << mag.str();
            coeff_printed = true;
        }
        if (has_vars) {
            bool first_var = true;
            for (std::size_t i = 0; i < nvars_; ++i) {
                if (!e[i]) continue;
                if (coeff_printed || !first_var) out << "*";
                out << names[i];
                if (e[i] > 1) out << "^" << e[i];
                first_var = false;
                coeff_printed = true;
            }
        }
    }
    return out.str();
}

} // namespace dirackit
