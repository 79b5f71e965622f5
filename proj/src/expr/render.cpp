#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "hojman/expr.hpp"

namespace hojman {

namespace {

// Binding levels, loosest first, mirroring the grammar productions.
enum Level { kSum = 1, kProduct = 2, kPower = 3, kUnary = 4, kAtom = 5 };

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

int level_of(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            return std::signbit(e.value()) ? kUnary : kAtom;
        case Expr::Kind::Variable:
        case Expr::Kind::Call:
            return kAtom;
        case Expr::Kind::Neg:
            return kUnary;
        case Expr::Kind::Pow:
            return kPower;
        case Expr::Kind::Mul:
        case Expr::Kind::Div:
            return kProduct;
        default:
            return kSum;
    }
}

void emit(const Expr& e, int min_level, std::string& out);

void emit_child(const Expr& e, int min_level, std::string& out) {
    if (level_of(e) < min_level) {
        out += '(';
        emit(e, kSum, out);
        out += ')';
    } else {
        emit(e, min_level, out);
    }
}

void emit(const Expr& e, int /*min_level*/, std::string& out) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            if (std::signbit(e.value())) {
                out += '-';
                out += format_number(-e.value());
            } else {
                out += format_number(e.value());
            }
            return;
        case Expr::Kind::Variable:
            out += e.name();
            return;
        case Expr::Kind::Neg:
            out += '-';
            emit_child(e.operand(), kUnary, out);
            return;
        case Expr::Kind::Call:
            out += func_name(e.func());
            out += '(';
            emit(e.operand(), kSum, out);
            out += ')';
            return;
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
            emit_child(e.lhs(), kSum, out);
            out += e.kind() == Expr::Kind::Add ? " + " : " - ";
            emit_child(e.rhs(), kProduct, out);
            return;
        case Expr::Kind::Mul:
        case Expr::Kind::Div:
            emit_child(e.lhs(), kProduct, out);
            out += e.kind() == Expr::Kind::Mul ? '*' : '/';
            emit_child(e.rhs(), kPower, out);
            return;
        case Expr::Kind::Pow:
            emit_child(e.lhs(), kUnary, out);
            out += '^';
            emit_child(e.rhs(), kPower, out);
            return;
    }
}

}  // namespace

std::string render(const Expr& e) {
    std::string out;
    emit(e, kSum, out);
    return out;
}

}  // namespace hojman
