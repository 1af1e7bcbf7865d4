#pragma once

// Sparse exact multivariate polynomials over Rational coefficients.
// Terms are kept in a map ordered graded-lexicographically, with zero
// coefficients erased, so structural equality is semantic equality and
// printing is deterministic.

#include "dirackit/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dirackit {

using ExpVec = std::vector<std::uint32_t>;

// Graded-lexicographic: compare total degree first, then exponents left to right.
struct GrlexLess {
    bool operator()(const ExpVec& a, const ExpVec& b) const {
        std::uint64_t da = 0, db = 0;
        for (auto e : a) da += e;
        for (auto e : b) db += e;
        if (da != db) return da < db;
        return a < b;
    }
};

class PolyExpr {
public:
    using TermMap = std::map<ExpVec, Rational, GrlexLess>;

    explicit PolyExpr(std::size_t nvars) : nvars_(nvars) {}

    static PolyExpr constant(std::size_t nvars, Rational c);
    static PolyExpr variable(std::size_t nvars, std::size_t index);
    static PolyExpr monomial(std::size_t nvars, ExpVec exps, Rational c);

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    std::size_t degree() const;  // 0 for the zero polynomial
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    friend bool operator==(const PolyExpr& a, const PolyExpr& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const PolyExpr& a, const PolyExpr& b) { return !(a == b); }

    PolyExpr operator-() const;
    friend PolyExpr operator+(const PolyExpr& a, const PolyExpr& b);
    friend PolyExpr operator-(const PolyExpr& a, const PolyExpr& b);
    friend PolyExpr operator*(const PolyExpr& a, const PolyExpr& b);
    PolyExpr scaled(const Rational& c) const;
    PolyExpr pow(unsigned e) const;

    PolyExpr diff(std::size_t var_index) const;

    Rational eval(std::span<const Rational> point) const;
    double eval(std::span<const double> point) const;

    // Deterministic canonical rendering; parse_poly(str(names), names) is the
    // identity. The zero polynomial prints as "0".
    std::string str(const std::vector<std::string>& names) const;

    void add_term(const ExpVec& exps, const Rational& c);

private:
    void check_same_space(const PolyExpr& other) const;

    std::size_t nvars_;
    TermMap terms_;
};

// Thrown by parse_poly. `offset` is the byte offset into the source string.
struct ParseError : std::runtime_error {
    enum class Kind { syntax, unknown_variable, bad_exponent };
    ParseError(Kind k, std::size_t off, const std::string& msg)
        : std::runtime_error(msg), kind(k), offset(off) {}
    Kind kind;
    std::size_t offset;
};

// Grammar:
//   expr     := term (('+'|'-') term)*
//   term     := factor ('*' factor)*
//   factor   := base ('^' uint)?
//   base     := rational | var | '(' expr ')' | '-' factor
//   rational := uint ('/' uint)?
// The UTF-8 minus sign U+2212 is accepted as '-'.
PolyExpr parse_poly(std::string_view src, const std::vector<std::string>& vars);

} // namespace dirackit
