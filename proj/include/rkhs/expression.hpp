#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "rkhs/bigfloat.hpp"

namespace rkhs {

/// A parsed real expression in (at most) one variable.
///
/// Grammar: literals, the variable, `pi`, `+ - * /`, unary minus,
/// parentheses, `pow(e, k)` with an integer literal `k`, and the functions
/// `exp sin cos sqrt abs`. The same tree evaluates in double or BigFloat;
/// literals are re-read from their decimal text at the BigFloat precision.
class Expression {
public:
    struct Node;

    /// Throws `ConfigError` with the offending position on malformed input.
    static Expression parse(std::string_view text, std::string_view variable = "x");

    [[nodiscard]] double operator()(double value) const;
    [[nodiscard]] BigFloat operator()(const BigFloat& value) const;

    /// Evaluates an expression without free variables.
    [[nodiscard]] BigFloat constant(unsigned precision_bits = kDefaultPrecisionBits) const;
    [[nodiscard]] bool uses_variable() const;

    [[nodiscard]] const std::string& text() const { return text_; }
    [[nodiscard]] const std::string& variable() const { return variable_; }

private:
    Expression(std::string text, std::string variable, std::shared_ptr<const Node> root)
        : text_(std::move(text)), variable_(std::move(variable)), root_(std::move(root)) {}

    std::string text_;
    std::string variable_;
    std::shared_ptr<const Node> root_;
};

/// Parses a scalar such as "0.25", "1e-3" or "exp(-100)".
BigFloat parse_scalar(std::string_view text, unsigned precision_bits = kDefaultPrecisionBits);

/// Plain decimal literals are read with correct rounding; anything else goes through `parse_scalar`.
double parse_real(std::string_view text);

}  // namespace rkhs
