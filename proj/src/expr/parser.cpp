#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "hojman/expr.hpp"

namespace hojman {

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail({"operator", "end of input"});
        return e;
    }

private:
    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                lhs = lhs + parse_term();
            } else if (accept('-')) {
                lhs = lhs - parse_term();
            } else {
                return lhs;
            }
        }
    }

    Expr parse_term() {
        Expr lhs = parse_factor();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                lhs = lhs * parse_factor();
            } else if (accept('/')) {
                lhs = lhs / parse_factor();
            } else {
                return lhs;
            }
        }
    }

    // Right-associative: a^b^c is a^(b^c).
    Expr parse_factor() {
        Expr base = parse_unary();
        skip_ws();
        if (accept('^')) return pow(base, parse_factor());
        return base;
    }

    Expr parse_unary() {
        skip_ws();
        if (accept('-')) return -parse_unary();
        return parse_primary();
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail({"number", "identifier", "'('", "'-'"});
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            std::string name(src_.substr(start, pos_ - start));
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '(') {
                auto f = func_from_name(name);
                if (!f) {
                    throw ParseError(ParseError::Kind::UnknownFunction, start,
                                     {"sin", "cos", "tan", "exp", "log", "sqrt", "abs"},
                                     "unknown function '" + name + "' at offset " + std::to_string(start));
                }
                ++pos_;
                Expr arg = parse_expr();
                skip_ws();
                if (!accept(')')) fail({"')'"});
                return Expr::call(*f, arg);
            }
            return Expr::variable(std::move(name));
        }
        if (accept('(')) {
            Expr inner = parse_expr();
            skip_ws();
            if (!accept(')')) fail({"')'"});
            return inner;
        }
        fail({"number", "identifier", "'('", "'-'"});
    }

    // digits [ "." digits ] [ exponent ] | "." digits [ exponent ]
    Expr parse_number() {
        std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t int_digits = digits();
        std::size_t frac_digits = 0;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            frac_digits = digits();
        }
        if (int_digits + frac_digits == 0) {
            pos_ = start;
            fail({"number"});
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = mark + 1;
                fail({"exponent digits"});
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_) {
            pos_ = start;
            fail({"finite number"});
        }
        return Expr(value);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
        std::string msg = "syntax error at offset " + std::to_string(pos_) + ": found " + found + ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += " or ";
            msg += expected[i];
        }
        throw ParseError(ParseError::Kind::Syntax, pos_, std::move(expected), msg);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src) { return Parser(src).parse(); }

}  // namespace hojman
