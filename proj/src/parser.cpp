#include "rd/parser.hpp"

#include <cctype>

namespace rd {

namespace {

struct Token {
    enum Kind { number, ident, symbol, end } kind = end;
    std::string text;
    std::size_t column = 0;
};

std::vector<Token> tokenize(std::string_view s)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.column = i + 1;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Token::number;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                t.text += s[i++];
            }
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Token::ident;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
                t.text += s[i++];
            }
        } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            t.kind = Token::symbol;
            t.text = "->";
            i += 2;
        } else if (std::string_view("+-*/^()").find(c) != std::string_view::npos) {
            t.kind = Token::symbol;
            t.text = std::string(1, c);
            ++i;
        } else {
            throw Error(ErrorCode::SyntaxError, "unexpected character '" + std::string(1, c) + "' at column " +
                                                    std::to_string(i + 1));
        }
        out.push_back(std::move(t));
    }
    Token e;
    e.column = s.size() + 1;
    out.push_back(e);
    return out;
}

std::optional<int> jet_order(const std::string& name)
{
    if (name == "u") {
        return 0;
    }
    if (name == "ux") {
        return 1;
    }
    if (name == "uxx") {
        return 2;
    }
    if (name == "uxxx") {
        return 3;
    }
    if (name.size() > 1 && name[0] == 'u' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        if (name.size() > 4) {
            throw Error(ErrorCode::SyntaxError, "jet order in '" + name + "' is too large");
        }
        return std::stoi(name.substr(1));
    }
    return std::nullopt;
}

class Parser {
public:
    Parser(std::string_view text, const ParseOptions& options, bool allow_d)
        : tokens_(tokenize(text)), options_(options), allow_d_(allow_d)
    {
    }

    DiffOperator top(bool* functional)
    {
        DiffOperator value;
        if (functional != nullptr && peek().kind == Token::ident && peek().text == "int" && peek(1).text == "(") {
            pos_ += 2;
            value = expr();
            expect(")");
            *functional = true;
        } else {
            value = expr();
        }
        if (peek().kind != Token::end) {
            fail("unexpected '" + peek().text + "'");
        }
        return value;
    }

    DiffOperator expr()
    {
        DiffOperator value;
        bool negate = false;
        if (accept("-")) {
            negate = true;
        } else {
            accept("+");
        }
        value = term();
        if (negate) {
            value = -value;
        }
        while (true) {
            if (accept("+")) {
                value += term();
            } else if (accept("-")) {
                value -= term();
            } else {
                return value;
            }
        }
    }

private:
    const Token& peek(std::size_t ahead = 0) const
    {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }

    bool accept(const char* symbol)
    {
        if (peek().kind == Token::symbol && peek().text == symbol) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(const char* symbol)
    {
        if (!accept(symbol)) {
            fail(std::string("expected '") + symbol + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        const Token& t = peek();
        throw Error(ErrorCode::SyntaxError,
                    what + " at column " + std::to_string(t.column) + (t.kind == Token::end ? " (end of input)" : ""));
    }

    static std::optional<Rational> as_number(const DiffOperator& op)
    {
        if (op.is_zero()) {
            return Rational(0);
        }
        if (op.order() != 0) {
            return std::nullopt;
        }
        const DiffPoly& c = op.coefficient(0);
        if (c.size() != 1) {
            return std::nullopt;
        }
        const auto& [key, coeff] = *c.terms().begin();
        if (key.eps != 0 || !key.mono.is_constant() || !coeff.is_numeric()) {
            return std::nullopt;
        }
        return coeff.constant();
    }

    DiffOperator term()
    {
        DiffOperator value = power();
        while (true) {
            if (accept("*")) {
                value = compose(value, power());
            } else if (peek().kind == Token::symbol && peek().text == "/") {
                const std::size_t column = peek().column;
                ++pos_;
                const auto d = as_number(power());
                if (!d || *d == 0) {
                    throw Error(ErrorCode::SyntaxError,
                                "division by a non-constant or zero at column " + std::to_string(column));
                }
                value *= ParamExpr(Rational(1) / *d);
            } else {
                return value;
            }
        }
    }

    DiffOperator power()
    {
        DiffOperator base = primary();
        if (!accept("^")) {
            return base;
        }
        if (peek().kind != Token::number) {
            fail("expected an integer exponent");
        }
        const std::string digits = peek().text;
        ++pos_;
        if (digits.size() > 3) {
            fail("exponent too large");
        }
        const int n = std::stoi(digits);
        DiffOperator out = DiffOperator::multiplication(DiffPoly(1));
        for (int i = 0; i < n; ++i) {
            out = compose(out, base);
        }
        return out;
    }

    DiffOperator primary()
    {
        const Token t = peek();
        if (t.kind == Token::number) {
            ++pos_;
            return DiffOperator::multiplication(DiffPoly(ParamExpr(parse_rational(t.text))));
        }
        if (accept("(")) {
            DiffOperator inner = expr();
            expect(")");
            return inner;
        }
        if (t.kind != Token::ident) {
            fail(t.kind == Token::end ? "unexpected end of input" : "unexpected '" + t.text + "'");
        }
        ++pos_;
        if (t.text == "dx" && peek().text == "(") {
            ++pos_;
            const DiffOperator inner = expr();
            expect(")");
            if (inner.order() > 0) {
                fail("dx(...) needs a polynomial argument");
            }
            return DiffOperator::multiplication(inner.coefficient(0).dx());
        }
        if (t.text == "int") {
            fail("int(...) is only allowed around the whole expression");
        }
        if (t.text == "eps") {
            return DiffOperator::multiplication(DiffPoly::eps());
        }
        if (t.text == "D") {
            if (!allow_d_) {
                --pos_;
                fail("the operator D is not allowed here");
            }
            return DiffOperator::dx();
        }
        if (const auto order = jet_order(t.text)) {
            return DiffOperator::multiplication(DiffPoly::jet(*order));
        }
        const auto it = options_.params.find(t.text);
        if (it == options_.params.end()) {
            throw Error(ErrorCode::UnknownParameter,
                        "'" + t.text + "' at column " + std::to_string(t.column) + " is not a declared parameter");
        }
        if (it->second) {
            return DiffOperator::multiplication(DiffPoly(ParamExpr(*it->second)));
        }
        return DiffOperator::multiplication(DiffPoly::parameter(t.text));
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const ParseOptions& options_;
    bool allow_d_;
};

DiffPoly as_poly(const DiffOperator& op, const ParseOptions& options)
{
    if (op.order() > 0) {
        throw Error(ErrorCode::SyntaxError, "expected a polynomial, got the operator " + op.to_string());
    }
    return op.coefficient(0).with_truncation(options.truncation);
}

} // namespace

Expression parse(std::string_view text, const ParseOptions& options)
{
    bool functional = false;
    const DiffOperator op = Parser(text, options, false).top(&functional);
    const DiffPoly p = as_poly(op, options);
    if (functional) {
        return integrate(p);
    }
    return p;
}

DiffPoly parse_poly(std::string_view text, const ParseOptions& options)
{
    return as_poly(Parser(text, options, false).top(nullptr), options);
}

LocalFunctional parse_functional(std::string_view text, const ParseOptions& options)
{
    bool functional = false;
    return integrate(as_poly(Parser(text, options, false).top(&functional), options));
}

DiffOperator parse_operator(std::string_view text, const ParseOptions& options)
{
    const DiffOperator op = Parser(text, options, true).top(nullptr);
    std::vector<DiffPoly> coeffs;
    for (const auto& c : op.coefficients()) {
        coeffs.push_back(c.with_truncation(options.truncation));
    }
    return DiffOperator(coeffs);
}

MiuraTransformation parse_miura(std::string_view text, int eps_order, const ParseOptions& options)
{
    const std::size_t arrow = text.find("->");
    if (arrow == std::string_view::npos) {
        return MiuraTransformation(parse_poly(text, options).with_eps_cap(eps_order), eps_order);
    }
    const DiffPoly lhs = parse_poly(text.substr(0, arrow), options);
    if (!(lhs == DiffPoly::u())) {
        throw Error(ErrorCode::SyntaxError, "a Miura map must read 'u -> ...'");
    }
    const DiffPoly rhs = parse_poly(text.substr(arrow + 2), options);
    return MiuraTransformation((rhs - DiffPoly::u()).with_eps_cap(eps_order), eps_order);
}

std::string render(const Expression& e)
{
    return std::visit([](const auto& x) { return x.to_string(); }, e);
}

} // namespace rd
