#pragma once

#include <string>

#include "hojman/expr.hpp"

namespace hojman {

struct Expr::Node {
    Kind kind = Kind::Constant;
    double value = 0.0;
    std::string name;
    Func func = Func::Sin;
    Expr a{nullptr};
    Expr b{nullptr};
};

}  // namespace hojman
