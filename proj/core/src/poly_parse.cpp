#include "dirackit/poly.hpp"

#include <cctype>
#include <map>

namespace dirackit {
namespace {

// Hand-rolled recursive descent over the problem-file polynomial grammar.
// Offsets in errors are byte offsets into the source.
class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src) {
        for (std::size_t i = 0; i < vars.size(); ++i) var_index_[vars[i]] = i;
        nvars_ = vars.size();
    }

    PolyExpr run() {
        skip_ws();
        PolyExpr p = parse_expr();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError(ParseError::Kind::syntax, pos_,
                             "unexpected input at byte " + std::to_string(pos_));
        return p;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    // Treats the UTF-8 encoding of U+2212 as a minus sign.
    bool peek_minus() const {
        if (at_end()) return false;
        if (src_[pos_] == '-') return true;
        return src_.size() - pos_ >= 3 && static_cast<unsigned char>(src_[pos_]) == 0xE2 &&
               static_cast<unsigned char>(src_[pos_ + 1]) == 0x88 &&
               static_cast<unsigned char>(src_[pos_ + 2]) == 0x92;
    }

    void consume_minus() { pos_ += (src_[pos_] == '-') ? 1 : 3; }

    [[noreturn]] void syntax(const std::string& what) const {
        throw ParseError(ParseError::Kind::syntax, pos_,
                         what + " at byte " + std::to_string(pos_));
    }

    PolyExpr parse_expr() {
        PolyExpr acc = parse_term();
        for (;;) {
            skip_ws();
            if (!at_end() && peek() == '+') {
                ++pos_;
                skip_ws();
                acc = acc + parse_term();
            } else if (peek_minus()) {
                consume_minus();
                skip_ws();
                acc = acc - parse_term();
            } else {
                return acc;
            }
        }
    }

    PolyExpr parse_term() {
        PolyExpr acc = parse_factor();
        for (;;) {
            skip_ws();
            if (!at_end() && peek() == '*') {
                ++pos_;
                skip_ws();
                acc = acc * parse_factor();
            } else {
                return acc;
            }
        }
    }

    PolyExpr parse_factor() {
        PolyExpr base = parse_base();
        skip_ws();
        if (!at_end() && peek() == '^') {
            ++pos_;
            skip_ws();
            unsigned e = parse_exponent();
            return base.pow(e);
        }
        return base;
    }

    unsigned parse_exponent() {
        if (peek_minus())
            throw ParseError(ParseError::Kind::bad_exponent, pos_,
                             "negative exponent at byte " + std::to_string(pos_));
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
            syntax("expected exponent");
        std::size_t start = pos_;
        std::string digits = read_digits();
        if (!at_end() && peek() == '.')
            throw ParseError(ParseError::Kind::bad_exponent, pos_,
                             "non-integer exponent at byte " + std::to_string(start));
        unsigned long v = 0;
        try {
            v = std::stoul(digits);
        } catch (const std::exception&) {
            throw ParseError(ParseError::Kind::bad_exponent, start,
                             "exponent out of range at byte " + std::to_string(start));
        }
        if (v > (1u << 20))
            throw ParseError(ParseError::Kind::bad_exponent, start,
                             "exponent out of range at byte " + std::to_string(start));
        return static_cast<unsigned>(v);
    }

    PolyExpr parse_base() {
        skip_ws();
        if (at_end()) syntax("unexpected end of input");
        char c = peek();
        if (peek_minus()) {
            consume_minus();
            skip_ws();
            return -parse_factor();
        }
        if (c == '(') {
            ++pos_;
            PolyExpr inner = parse_expr();
            skip_ws();
            if (at_end() || peek() != ')') syntax("expected ')'");
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_rational();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_var();
        syntax("unexpected character");
    }

    PolyExpr parse_rational() {
        std::string numer = read_digits();
        Rational value = Rational::from_string(numer);
        skip_ws();
        if (!at_end() && peek() == '/') {
            std::size_t slash = pos_;
            ++pos_;
            skip_ws();
            if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
                syntax("expected denominator");
            std::string denom = read_digits();
            Rational d = Rational::from_string(denom);
            if (d.is_zero())
                throw ParseError(ParseError::Kind::syntax, slash,
                                 "division by zero at byte " + std::to_string(slash));
            value /= d;
        }
        return PolyExpr::constant(nvars_, value);
    }

    PolyExpr parse_var() {
        std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        auto it = var_index_.find(name);
        if (it == var_index_.end())
            throw ParseError(ParseError::Kind::unknown_variable, start,
                             "unknown variable '" + name + "' at byte " + std::to_string(start));
        return PolyExpr::variable(nvars_, it->second);
    }

    std::string read_digits() {
        std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t nvars_ = 0;
    std::map<std::string, std::size_t, std::less<>> var_index_;
};

} // namespace

PolyExpr parse_poly(std::string_view src, const std::vector<std::string>& vars) {
    return Parser(src, vars).run();
}

} // namespace dirackit
