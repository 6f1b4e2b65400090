#ifndef DINCL_EXPRESSION_HPP
#define DINCL_EXPRESSION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dincl {

/// A scalar arithmetic expression over state variables x1..xn.
///
/// Grammar: + - * / with the usual precedence, unary minus, parentheses,
/// numeric literals, the constants `pi` and `e`, variables `x1`..`xn`, and the
/// functions sin, cos, exp, tanh, abs, sign (one argument) and min, max (two).
/// Parsing compiles to a postfix program; evaluation does not allocate.
class Expression {
public:
    /// Throws ConfigError with the offending column on malformed input or a
    /// variable index above `dim`.
    static Expression parse(std::string_view text, std::size_t dim);

    /// A constant expression, for building systems in code.
    static Expression constant(double value);

    double operator()(std::span<const double> x) const noexcept;

    const std::string& source() const noexcept { return source_; }

    static constexpr std::size_t kMaxStackDepth = 64;

    enum class Op : std::uint8_t {
        Const, Var, Add, Sub, Mul, Div, Neg,
        Sin, Cos, Exp, Tanh, Abs, Sign, Min, Max,
    };
    struct Instr {
        Op op;
        std::uint32_t var = 0;
        double value = 0.0;
    };

private:
    std::string source_;
    std::vector<Instr> program_;
};

} // namespace dincl

#endif // DINCL_EXPRESSION_HPP
