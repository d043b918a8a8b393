#pragma once

#include <string>
#include <vector>

namespace chaincalc {

// Arithmetic over point coordinates, used anywhere the command line accepts a
// field formula. Variables are x0..x9 (x, y, z alias the first three); the
// usual operators + - * / ^ with parentheses; constants pi, e, inf; functions
// abs, sqrt, exp, log, sin, cos, tan, floor, ceil, min, max, pow.
class Expression {
  public:
    static Expression parse(const std::string& text);

    double eval(const std::vector<double>& coords) const;
    double eval1(double x) const { return eval({x}); }

    // 1 + the highest coordinate index referenced; 0 for a constant formula
    int arity() const { return max_var_ + 1; }
    const std::string& text() const { return text_; }

  private:
    enum class Kind { constant, variable, negate, add, sub, mul, div, pow_op, call };
    struct Node {
        Kind kind = Kind::constant;
        double value = 0.0; // constant
        int var = -1;       // variable
        int fn = -1;        // call: index into the function table
        int a = -1, b = -1; // children
    };
    std::vector<Node> nodes_;
    int root_ = -1;
    int max_var_ = -1;
    std::string text_;

    double eval_node(int id, const std::vector<double>& coords) const;
};

} // namespace chaincalc
