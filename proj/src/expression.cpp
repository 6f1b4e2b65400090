#include "dincl/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "dincl/errors.hpp"

namespace dincl {

namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

class Parser {
public:
    Parser(std::string_view text, std::size_t dim) : text_(text), dim_(dim) {}

    std::vector<Instr> run()
    {
        skip_space();
        if (pos_ == text_.size()) {
            fail("empty expression");
        }
        parse_expr();
        skip_space();
        if (pos_ != text_.size()) {
            fail(std::string("unexpected '") + text_[pos_] + "'");
        }
        return std::move(program_);
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("expression '" + std::string(text_) + "': " + what + " at column " +
                          std::to_string(pos_ + 1));
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    void emit(Op op, std::uint32_t var = 0, double value = 0.0) { program_.push_back({op, var, value}); }

    void parse_expr()
    {
        parse_term();
        for (;;) {
            if (accept('+')) {
                parse_term();
                emit(Op::Add);
            } else if (accept('-')) {
                parse_term();
                emit(Op::Sub);
            } else {
                return;
            }
        }
    }

    void parse_term()
    {
        parse_unary();
        for (;;) {
            if (accept('*')) {
                parse_unary();
                emit(Op::Mul);
            } else if (accept('/')) {
                parse_unary();
                emit(Op::Div);
            } else {
                return;
            }
        }
    }

    void parse_unary()
    {
        if (accept('-')) {
            parse_unary();
            emit(Op::Neg);
        } else if (accept('+')) {
            parse_unary();
        } else {
            parse_primary();
        }
    }

    void parse_primary()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            parse_expr();
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            parse_identifier();
            return;
        }
        fail(std::string("unexpected '") + c + "'");
    }

    void parse_number()
    {
        double value = 0.0;
        const char* begin = text_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
        if (ec != std::errc{} || ptr == begin) {
            fail("malformed number");
        }
        pos_ += static_cast<std::size_t>(ptr - begin);
        emit(Op::Const, 0, value);
    }

    void parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);

        if (name.size() > 1 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
            std::size_t index = 0;
            std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (index < 1 || index > dim_) {
                pos_ = start;
                fail("variable '" + std::string(name) + "' outside x1..x" + std::to_string(dim_));
            }
            emit(Op::Var, static_cast<std::uint32_t>(index - 1));
            return;
        }
        if (name == "pi") {
            emit(Op::Const, 0, std::numbers::pi);
            return;
        }
        if (name == "e") {
            emit(Op::Const, 0, std::numbers::e);
            return;
        }

        struct Fn {
            std::string_view name;
            Op op;
            int arity;
        };
        static constexpr std::array<Fn, 8> kFunctions{{
            {"sin", Op::Sin, 1},
            {"cos", Op::Cos, 1},
            {"exp", Op::Exp, 1},
            {"tanh", Op::Tanh, 1},
            {"abs", Op::Abs, 1},
            {"sign", Op::Sign, 1},
            {"min", Op::Min, 2},
            {"max", Op::Max, 2},
        }};
        for (const Fn& fn : kFunctions) {
            if (fn.name == name) {
                expect('(');
                parse_expr();
                for (int a = 1; a < fn.arity; ++a) {
                    expect(',');
                    parse_expr();
                }
                expect(')');
                emit(fn.op);
                return;
            }
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }

    std::string_view text_;
    std::size_t dim_;
    std::size_t pos_ = 0;
    std::vector<Instr> program_;
};

std::size_t stack_depth(const std::vector<Instr>& program)
{
    std::size_t depth = 0;
    std::size_t peak = 0;
    for (const Instr& in : program) {
        switch (in.op) {
        case Op::Const:
        case Op::Var:
            ++depth;
            break;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
        case Op::Min:
        case Op::Max:
            --depth;
            break;
        default:
            break;
        }
        peak = std::max(peak, depth);
    }
    return peak;
}

} // namespace

Expression Expression::parse(std::string_view text, std::size_t dim)
{
    Expression e;
    e.source_ = std::string(text);
    e.program_ = Parser(text, dim).run();
    if (stack_depth(e.program_) > kMaxStackDepth) {
        throw ConfigError("expression '" + e.source_ + "': nesting deeper than " + std::to_string(kMaxStackDepth));
    }
    return e;
}

Expression Expression::constant(double value)
{
    Expression e;
    e.source_ = std::to_string(value);
    e.program_.push_back({Op::Const, 0, value});
    return e;
}

double Expression::operator()(std::span<const double> x) const noexcept
{
    std::array<double, kMaxStackDepth> stack;
    std::size_t top = 0;
    for (const Instr& in : program_) {
        switch (in.op) {
        case Op::Const:
            stack[top++] = in.value;
            break;
        case Op::Var:
            stack[top++] = in.var < x.size() ? x[in.var] : std::nan("");
            break;
        case Op::Add:
            --top;
            stack[top - 1] += stack[top];
            break;
        case Op::Sub:
            --top;
            stack[top - 1] -= stack[top];
            break;
        case Op::Mul:
            --top;
            stack[top - 1] *= stack[top];
            break;
        case Op::Div:
            --top;
            stack[top - 1] /= stack[top];
            break;
        case Op::Min:
            --top;
            stack[top - 1] = std::min(stack[top - 1], stack[top]);
            break;
        case Op::Max:
            --top;
            stack[top - 1] = std::max(stack[top - 1], stack[top]);
            break;
        case Op::Neg:
            stack[top - 1] = -stack[top - 1];
            break;
        case Op::Sin:
            stack[top - 1] = std::sin(stack[top - 1]);
            break;
        case Op::Cos:
            stack[top - 1] = std::cos(stack[top - 1]);
            break;
        case Op::Exp:
            stack[top - 1] = std::exp(stack[top - 1]);
            break;
        case Op::Tanh:
            stack[top - 1] = std::tanh(stack[top - 1]);
            break;
        case Op::Abs:
            stack[top - 1] = std::abs(stack[top - 1]);
            break;
        case Op::Sign: {
            const double v = stack[top - 1];
            stack[top - 1] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
            break;
        }
        }
    }
    return stack[0];
}

} // namespace dincl
