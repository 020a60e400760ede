#pragma once

#include <span>
#include <string>
#include <vector>

#include "hessianlab/errors.hpp"

namespace hessianlab::expr {

// Arithmetic over {t, r2 (=|z|^2), x1, y1, x2, y2, j} with
// {exp, sin, cos, log, abs, min, max}, numeric literals, + - * / and parens.
// Which variables are admitted is fixed at parse time per slot.
class Expression {
public:
    struct Vars {
        bool t = false;     // first argument of F
        bool j = false;     // stability family index
        int coords = 0;     // number of complex coordinates available (n)
    };

    static Expression parse(const std::string& src, const Vars& allowed);

    // z carries 2n real coordinates (x1, y1, ...); r2 is derived from z.
    double eval(double t, std::span<const double> z, double j = 1.0) const;
    double eval_spatial(std::span<const double> z) const { return eval(0.0, z); }

    bool uses_t() const { return uses_t_; }
    bool uses_j() const { return uses_j_; }
    const std::string& source() const { return src_; }

private:
    enum class Op : std::uint8_t {
        Const, VarT, VarJ, VarR2, Coord,
        Add, Sub, Mul, Div, Neg,
        Exp, Sin, Cos, Log, Abs, Min, Max
    };
    struct Node {
        Op op;
        int a = -1, b = -1;
        double value = 0.0; // Const payload or Coord index
    };
    std::vector<Node> nodes_;
    int root_ = -1;
    bool uses_t_ = false, uses_j_ = false;
    std::string src_;

    double eval_node(int idx, double t, std::span<const double> z, double j) const;
};

} // namespace hessianlab::expr
