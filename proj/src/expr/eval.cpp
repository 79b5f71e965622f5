#include <algorithm>
#include <cmath>
#include <vector>

#include "hojman/expr.hpp"

namespace hojman {

double Bindings::at(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw UnboundVariableError(name);
    return it->second;
}

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> slots) {
    Memo memo;
    emit(e, slots, memo);
}

std::size_t CompiledExpr::emit(const Expr& e, std::span<const std::string> slots, Memo& memo) {
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;

    Instr ins{Op::Const};
    switch (e.kind()) {
        case Expr::Kind::Constant:
            ins.c = e.value();
            break;
        case Expr::Kind::Variable: {
            auto it = std::find(slots.begin(), slots.end(), e.name());
            if (it == slots.end()) throw UnboundVariableError(e.name());
            ins.op = Op::Load;
            ins.a = static_cast<std::size_t>(it - slots.begin());
            break;
        }
        case Expr::Kind::Neg:
            ins.op = Op::Neg;
            ins.a = emit(e.operand(), slots, memo);
            break;
        case Expr::Kind::Call:
            ins.a = emit(e.operand(), slots, memo);
            switch (e.func()) {
                case Func::Sin: ins.op = Op::Sin; break;
                case Func::Cos: ins.op = Op::Cos; break;
                case Func::Tan: ins.op = Op::Tan; break;
                case Func::Exp: ins.op = Op::Exp; break;
                case Func::Log: ins.op = Op::Log; break;
                case Func::Sqrt: ins.op = Op::Sqrt; break;
                case Func::Abs: ins.op = Op::Abs; break;
            }
            break;
        default:
            ins.a = emit(e.lhs(), slots, memo);
            ins.b = emit(e.rhs(), slots, memo);
            switch (e.kind()) {
                case Expr::Kind::Add: ins.op = Op::Add; break;
                case Expr::Kind::Sub: ins.op = Op::Sub; break;
                case Expr::Kind::Mul: ins.op = Op::Mul; break;
                case Expr::Kind::Div: ins.op = Op::Div; break;
                default: ins.op = Op::Pow; break;
            }
    }
    program_.push_back(ins);
    sources_.push_back(e);
    std::size_t index = program_.size() - 1;
    memo.emplace(e.id(), index);
    return index;
}

void CompiledExpr::fail(std::size_t index, const std::string& reason) const {
    throw DomainError(render(sources_[index]), reason);
}

double CompiledExpr::operator()(std::span<const double> values) const {
    std::vector<double> r(program_.size());
    for (std::size_t i = 0; i < program_.size(); ++i) {
        const Instr& in = program_[i];
        double x = 0.0;
        switch (in.op) {
            case Op::Const:
                x = in.c;
                break;
            case Op::Load:
                x = values[in.a];
                break;
            case Op::Neg:
                x = -r[in.a];
                break;
            case Op::Add:
                x = r[in.a] + r[in.b];
                break;
            case Op::Sub:
                x = r[in.a] - r[in.b];
                break;
            case Op::Mul:
                x = r[in.a] * r[in.b];
                break;
            case Op::Div:
                if (r[in.b] == 0.0) fail(i, "division by zero");
                x = r[in.a] / r[in.b];
                break;
            case Op::Pow:
                if (r[in.a] < 0.0 && std::trunc(r[in.b]) != r[in.b]) fail(i, "negative base with non-integer exponent");
                if (r[in.a] == 0.0 && r[in.b] < 0.0) fail(i, "zero base with negative exponent");
                x = std::pow(r[in.a], r[in.b]);
                break;
            case Op::Sin:
                x = std::sin(r[in.a]);
                break;
            case Op::Cos:
                x = std::cos(r[in.a]);
                break;
            case Op::Tan:
                x = std::tan(r[in.a]);
                break;
            case Op::Exp:
                x = std::exp(r[in.a]);
                break;
            case Op::Log:
                if (!(r[in.a] > 0.0)) fail(i, "log of nonpositive argument");
                x = std::log(r[in.a]);
                break;
            case Op::Sqrt:
                if (r[in.a] < 0.0) fail(i, "sqrt of negative argument");
                x = std::sqrt(r[in.a]);
                break;
            case Op::Abs:
                x = std::abs(r[in.a]);
                break;
        }
        if (!std::isfinite(x)) fail(i, "non-finite result");
        r[i] = x;
    }
    return r.back();
}

double eval(const Expr& e, const Bindings& b) {
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& name : e.variables()) {
        names.push_back(name);
        values.push_back(b.at(name));
    }
    return CompiledExpr(e, names)(values);
}

}  // namespace hojman
