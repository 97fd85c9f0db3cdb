#include "rkhs/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "rkhs/error.hpp"

namespace rkhs {

struct Expression::Node {
    enum class Kind { Literal, Variable, Pi, Negate, Add, Sub, Mul, Div, Pow, Exp, Sin, Cos, Sqrt, Abs };

    Kind kind;
    std::string literal;  // decimal text for Literal
    double literal_value = 0.0;
    long exponent = 0;  // for Pow
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
public:
    Parser(std::string_view text, std::string_view variable) : text_(text), variable_(variable) {}

    NodePtr parse() {
        NodePtr root = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression '" + std::string(text_) + "': " + what + " at offset " + std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static NodePtr make(Node::Kind kind, std::vector<NodePtr> args = {}) {
        auto node = std::make_shared<Node>();
        node->kind = kind;
        node->args = std::move(args);
        return node;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Node::Kind::Add, {lhs, term()});
            } else if (accept('-')) {
                lhs = make(Node::Kind::Sub, {lhs, term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Node::Kind::Mul, {lhs, unary()});
            } else if (accept('/')) {
                lhs = make(Node::Kind::Div, {lhs, unary()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::Negate, {unary()});
        if (accept('+')) return unary();
        return primary();
    }

    std::string number_text() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Literal;
            node->literal = number_text();
            char* end = nullptr;
            node->literal_value = std::strtod(node->literal.c_str(), &end);
            if (end == nullptr || *end != '\0') fail("malformed number '" + node->literal + "'");
            return node;
        }
        if (accept('(')) {
            NodePtr inner = expression();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name(text_.substr(start, pos_ - start));
            if (name == variable_) return make(Node::Kind::Variable);
            if (name == "pi") return make(Node::Kind::Pi);
            if (name == "pow") return power();
            static const std::pair<const char*, Node::Kind> functions[] = {
                {"exp", Node::Kind::Exp}, {"sin", Node::Kind::Sin},   {"cos", Node::Kind::Cos},
                {"sqrt", Node::Kind::Sqrt}, {"abs", Node::Kind::Abs},
            };
            for (const auto& [fname, kind] : functions) {
                if (name == fname) {
                    expect('(');
                    NodePtr arg = expression();
                    expect(')');
                    return make(kind, {arg});
                }
            }
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr power() {
        expect('(');
        NodePtr base = expression();
        expect(',');
        const bool negative = accept('-');
        if (!negative) accept('+');
        const std::string digits = number_text();
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            fail("pow exponent must be an integer literal");
        }
        expect(')');
        auto node = std::make_shared<Node>();
        node->kind = Node::Kind::Pow;
        node->exponent = std::stol(digits) * (negative ? -1 : 1);
        node->args = {base};
        return node;
    }

    std::string_view text_;
    std::string_view variable_;
    std::size_t pos_ = 0;
};

double literal_of(const Node& node, double) { return node.literal_value; }
BigFloat literal_of(const Node& node, const BigFloat& like) {
    return BigFloat::from_string(node.literal, like.precision());
}
double pi_like(double) { return std::numbers::pi; }
BigFloat pi_like(const BigFloat& like) { return BigFloat::pi(like.precision()); }

template <typename T>
T evaluate(const Node& node, const T& x) {
    using std::abs, std::cos, std::exp, std::pow, std::sin, std::sqrt;
    using Kind = Node::Kind;
    const auto arg = [&](std::size_t i) { return evaluate(*node.args[i], x); };
    switch (node.kind) {
        case Kind::Literal: return literal_of(node, x);
        case Kind::Variable: return x;
        case Kind::Pi: return pi_like(x);
        case Kind::Negate: return -arg(0);
        case Kind::Add: return arg(0) + arg(1);
        case Kind::Sub: return arg(0) - arg(1);
        case Kind::Mul: return arg(0) * arg(1);
        case Kind::Div: return arg(0) / arg(1);
        case Kind::Pow:
            if constexpr (std::is_same_v<T, double>) {
                return std::pow(arg(0), static_cast<double>(node.exponent));
            } else {
                return pow(arg(0), node.exponent);
            }
        case Kind::Exp: return exp(arg(0));
        case Kind::Sin: return sin(arg(0));
        case Kind::Cos: return cos(arg(0));
        case Kind::Sqrt: return sqrt(arg(0));
        case Kind::Abs: return abs(arg(0));
    }
    return x;
}

bool mentions_variable(const Node& node) {
    if (node.kind == Node::Kind::Variable) return true;
    for (const auto& a : node.args) {
        if (mentions_variable(*a)) return true;
    }
    return false;
}

}  // namespace

Expression Expression::parse(std::string_view text, std::string_view variable) {
    Parser parser(text, variable);
    NodePtr root = parser.parse();
    return Expression(std::string(text), std::string(variable), std::move(root));
}

double Expression::operator()(double value) const { return evaluate(*root_, value); }

BigFloat Expression::operator()(const BigFloat& value) const { return evaluate(*root_, value); }

BigFloat Expression::constant(unsigned precision_bits) const {
    if (uses_variable()) throw ConfigError("expression '" + text_ + "' is not a constant");
    return evaluate(*root_, BigFloat(0.0, precision_bits));
}

bool Expression::uses_variable() const { return mentions_variable(*root_); }

BigFloat parse_scalar(std::string_view text, unsigned precision_bits) {
    return Expression::parse(text, "").constant(precision_bits);
}

double parse_real(std::string_view text) {
    const std::string owned(text);
    char* end = nullptr;
    const double value = std::strtod(owned.c_str(), &end);
    if (!owned.empty() && end == owned.c_str() + owned.size()) return value;
    return parse_scalar(text).to_double();
}

}  // namespace rkhs
