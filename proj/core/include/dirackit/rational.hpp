#pragma once

// Exact rational scalar backed by GMP. Canonical form (gcd(|num|,den)=1,
// den>0) is maintained by mpq canonicalization on every constructing path.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dirackit {

class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long n, long d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        v_ = mpq_class(n, d);
        v_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }
    explicit Rational(const mpz_class& z) : v_(z) {}

    // Accepts "123", "-7/3". Throws std::invalid_argument on malformed input.
    static Rational from_string(std::string_view s) {
        mpq_class q;
        if (s.empty() || mpq_set_str(q.get_mpq_t(), std::string(s).c_str(), 10) != 0)
            throw std::invalid_argument("Rational: cannot parse '" + std::string(s) + "'");
        if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
            throw std::invalid_argument("Rational: zero denominator in '" + std::string(s) + "'");
        q.canonicalize();
        return Rational(q);
    }

    // Exact conversion: every finite double is a dyadic rational.
    static Rational from_double(double x) {
        mpq_class q;
        mpq_set_d(q.get_mpq_t(), x);
        return Rational(q);
    }

    const mpq_class& raw() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }
    bool is_integer() const { return v_.get_den() == 1; }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational abs() const { return sign() < 0 ? -*this : *this; }

    Rational pow(unsigned e) const {
        mpq_class r(1);
        mpq_class base = v_;
        for (unsigned k = e; k;) {
            if (k & 1u) r *= base;
            k >>= 1u;
            if (k) base *= base;
        }
        return Rational(r);
    }

    double to_double() const { return v_.get_d(); }

    std::string str() const {
        if (is_integer()) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

private:
    mpq_class v_;
};

} // namespace dirackit
