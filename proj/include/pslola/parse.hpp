#pragma once

// Hand-rolled lexer and recursive-descent parser for specification files.
//
// File format, one declaration per line:
//   input  <name> : <type>            type in {int, uint, float, bool}
//   output <name> [: <type>] := <expr>
// `--` starts a comment running to end of line.  Expressions use the usual
// precedence: || < && < ==,!= < <,<=,>,>= < +,- < *,/,% < unary -,!.
// Stream references are `x` or `x[p, c]` with integer offset p and literal
// boundary value c.  Builtins: ite(c, a, b), sqrt(x), pow(x, y), abs(x).

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pslola/ast.hpp"

namespace pslola {

struct SpecError : std::runtime_error {
    int line;
    int column;
    SpecError(int line_, int col_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(col_) +
                             ": " + msg),
          line(line_),
          column(col_) {}
};

namespace detail {

enum class Tok {
    Ident, Int, Float, True, False,
    Input, Output, Ite, Sqrt, Pow, Abs,
    TypeInt, TypeUint, TypeFloat, TypeBool,
    Colon, Define,  // ':' and ':='
    LParen, RParen, LBracket, RBracket, Comma,
    Plus, Minus, Star, Slash, Percent,
    Lt, Le, Gt, Ge, EqEq, Ne, AndAnd, OrOr, Bang,
    Newline, End,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tok k, std::string text, int c) {
        out.push_back(Token{k, std::move(text), line, c});
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            push(Tok::Newline, "\\n", col);
            ++i; ++line; col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') { ++i; ++col; continue; }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
            while (i < src.size() && src[i] != '\n') { ++i; ++col; }
            continue;
        }
        int start_col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            std::string word = src.substr(i, j - i);
            col += static_cast<int>(j - i);
            i = j;
            Tok k = Tok::Ident;
            if (word == "input") k = Tok::Input;
            else if (word == "output") k = Tok::Output;
            else if (word == "ite") k = Tok::Ite;
            else if (word == "sqrt") k = Tok::Sqrt;
            else if (word == "pow") k = Tok::Pow;
            else if (word == "abs") k = Tok::Abs;
            else if (word == "true") k = Tok::True;
            else if (word == "false") k = Tok::False;
            else if (word == "int") k = Tok::TypeInt;
            else if (word == "uint") k = Tok::TypeUint;
            else if (word == "float") k = Tok::TypeFloat;
            else if (word == "bool") k = Tok::TypeBool;
            push(k, word, start_col);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            bool is_float = false;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.' && j + 1 < src.size() &&
                std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                is_float = true;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                size_t k2 = j + 1;
                if (k2 < src.size() && (src[k2] == '+' || src[k2] == '-')) ++k2;
                if (k2 < src.size() && std::isdigit(static_cast<unsigned char>(src[k2]))) {
                    is_float = true;
                    j = k2;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            std::string num = src.substr(i, j - i);
            col += static_cast<int>(j - i);
            i = j;
            push(is_float ? Tok::Float : Tok::Int, num, start_col);
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two(':', '=')) { push(Tok::Define, ":=", start_col); i += 2; col += 2; continue; }
        if (two('<', '=')) { push(Tok::Le, "<=", start_col); i += 2; col += 2; continue; }
        if (two('>', '=')) { push(Tok::Ge, ">=", start_col); i += 2; col += 2; continue; }
        if (two('=', '=')) { push(Tok::EqEq, "==", start_col); i += 2; col += 2; continue; }
        if (two('!', '=')) { push(Tok::Ne, "!=", start_col); i += 2; col += 2; continue; }
        if (two('&', '&')) { push(Tok::AndAnd, "&&", start_col); i += 2; col += 2; continue; }
        if (two('|', '|')) { push(Tok::OrOr, "||", start_col); i += 2; col += 2; continue; }
        switch (c) {
            case ':': push(Tok::Colon, ":", start_col); break;
            case '(': push(Tok::LParen, "(", start_col); break;
            case ')': push(Tok::RParen, ")", start_col); break;
            case '[': push(Tok::LBracket, "[", start_col); break;
            case ']': push(Tok::RBracket, "]", start_col); break;
            case ',': push(Tok::Comma, ",", start_col); break;
            case '+': push(Tok::Plus, "+", start_col); break;
            case '-': push(Tok::Minus, "-", start_col); break;
            case '*': push(Tok::Star, "*", start_col); break;
            case '/': push(Tok::Slash, "/", start_col); break;
            case '%': push(Tok::Percent, "%", start_col); break;
            case '<': push(Tok::Lt, "<", start_col); break;
            case '>': push(Tok::Gt, ">", start_col); break;
            case '!': push(Tok::Bang, "!", start_col); break;
            case '=':
                throw SpecError(line, start_col, "single '=' is not an operator; use '=='");
            default:
                throw SpecError(line, start_col,
                                std::string("unexpected character '") + c + "'");
        }
        ++i; ++col;
    }
    out.push_back(Token{Tok::End, "", line, col});
    return out;
}

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Spec parse_spec() {
        Spec spec;
        while (!at(Tok::End)) {
            if (at(Tok::Newline)) { advance(); continue; }
            if (at(Tok::Input)) {
                parse_input(spec);
            } else if (at(Tok::Output)) {
                parse_output(spec);
            } else {
                fail("expected 'input' or 'output' declaration");
            }
            if (!at(Tok::End)) expect(Tok::Newline, "end of declaration");
        }
        spec.reindex();
        if (spec.outputs.empty()) fail_at(toks_.back(), "specification has no output streams");
        return spec;
    }

    ExprPtr parse_single_expr() {
        ExprPtr e = parse_expr();
        if (!at(Tok::End)) fail("trailing input after expression");
        return e;
    }

  private:
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& peek() const { return toks_[pos_]; }
    bool at(Tok k) const { return peek().kind == k; }
    const Token& advance() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
    [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
        throw SpecError(t.line, t.column,
                        msg + (t.kind == Tok::End ? " (at end of input)"
                                                  : " (found '" + t.text + "')"));
    }

    const Token& expect(Tok k, const std::string& what) {
        if (!at(k)) fail("expected " + what);
        return advance();
    }

    static bool is_type(Tok k) {
        return k == Tok::TypeInt || k == Tok::TypeUint || k == Tok::TypeFloat ||
               k == Tok::TypeBool;
    }

    std::pair<Type, bool> parse_type() {
        if (!is_type(peek().kind)) fail("expected a type (int, uint, float, bool)");
        Tok k = advance().kind;
        switch (k) {
            case Tok::TypeUint: return {Type::Int, true};
            case Tok::TypeFloat: return {Type::Float, false};
            case Tok::TypeBool: return {Type::Bool, false};
            default: return {Type::Int, false};
        }
    }

    void parse_input(Spec& spec) {
        const Token& kw = expect(Tok::Input, "'input'");
        InputDecl d;
        d.line = kw.line;
        d.name = expect(Tok::Ident, "stream name").text;
        expect(Tok::Colon, "':' and a type");
        auto [t, uns] = parse_type();
        d.type = t;
        d.is_unsigned = uns;
        check_fresh(spec, d.name, kw);
        spec.inputs.push_back(std::move(d));
    }

    void parse_output(Spec& spec) {
        const Token& kw = expect(Tok::Output, "'output'");
        OutputDecl d;
        d.line = kw.line;
        d.name = expect(Tok::Ident, "stream name").text;
        if (at(Tok::Colon)) {
            advance();
            auto [t, uns] = parse_type();
            (void)uns;  // `output x : uint` carries no extra check; values are computed
            d.declared = t;
        }
        expect(Tok::Define, "':='");
        d.expr = parse_expr();
        check_fresh(spec, d.name, kw);
        spec.outputs.push_back(std::move(d));
    }

    static void check_fresh(const Spec& spec, const std::string& name, const Token& where) {
        for (const auto& in : spec.inputs)
            if (in.name == name) fail_at(where, "duplicate stream name '" + name + "'");
        for (const auto& o : spec.outputs)
            if (o.name == name) fail_at(where, "duplicate stream name '" + name + "'");
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::OrOr)) {
            int line = advance().line;
            lhs = make_expr(Expr{BinaryNode{BinOp::Or, lhs, parse_and()}, line});
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (at(Tok::AndAnd)) {
            int line = advance().line;
            lhs = make_expr(Expr{BinaryNode{BinOp::And, lhs, parse_equality()}, line});
        }
        return lhs;
    }

    ExprPtr parse_equality() {
        ExprPtr lhs = parse_relational();
        while (at(Tok::EqEq) || at(Tok::Ne)) {
            BinOp op = at(Tok::EqEq) ? BinOp::Eq : BinOp::Ne;
            int line = advance().line;
            lhs = make_expr(Expr{BinaryNode{op, lhs, parse_relational()}, line});
        }
        return lhs;
    }

    ExprPtr parse_relational() {
        ExprPtr lhs = parse_additive();
        while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
            BinOp op = at(Tok::Lt)   ? BinOp::Lt
                       : at(Tok::Le) ? BinOp::Le
                       : at(Tok::Gt) ? BinOp::Gt
                                     : BinOp::Ge;
            int line = advance().line;
            lhs = make_expr(Expr{BinaryNode{op, lhs, parse_additive()}, line});
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
            int line = advance().line;
            lhs = make_expr(Expr{BinaryNode{op, lhs, parse_multiplicative()}, line});
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
            BinOp op = at(Tok::Star)    ? BinOp::Mul
                       : at(Tok::Slash) ? BinOp::Div
                                        : BinOp::Mod;
            int line = advance().line;
            lhs = make_expr(Expr{BinaryNode{op, lhs, parse_unary()}, line});
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            int line = advance().line;
            return make_expr(Expr{UnaryNode{UnOp::Neg, parse_unary()}, line});
        }
        if (at(Tok::Bang)) {
            int line = advance().line;
            return make_expr(Expr{UnaryNode{UnOp::Not, parse_unary()}, line});
        }
        return parse_primary();
    }

    Value parse_literal_value() {
        bool neg = false;
        if (at(Tok::Minus)) { advance(); neg = true; }
        if (at(Tok::Int)) {
            std::int64_t v = std::strtoll(advance().text.c_str(), nullptr, 10);
            return Value{neg ? -v : v};
        }
        if (at(Tok::Float)) {
            double v = std::strtod(advance().text.c_str(), nullptr);
            return Value{neg ? -v : v};
        }
        if (neg) fail("expected a numeric literal after '-'");
        if (at(Tok::True)) { advance(); return Value{true}; }
        if (at(Tok::False)) { advance(); return Value{false}; }
        fail("expected a literal boundary value");
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int: {
                advance();
                return make_const(Value{std::strtoll(t.text.c_str(), nullptr, 10)}, t.line);
            }
            case Tok::Float: {
                advance();
                return make_const(Value{std::strtod(t.text.c_str(), nullptr)}, t.line);
            }
            case Tok::True: advance(); return make_const(Value{true}, t.line);
            case Tok::False: advance(); return make_const(Value{false}, t.line);
            case Tok::LParen: {
                advance();
                ExprPtr e = parse_expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ite: {
                advance();
                expect(Tok::LParen, "'(' after ite");
                ExprPtr c = parse_expr();
                expect(Tok::Comma, "','");
                ExprPtr a = parse_expr();
                expect(Tok::Comma, "','");
                ExprPtr b = parse_expr();
                expect(Tok::RParen, "')'");
                return make_expr(Expr{IteNode{c, a, b}, t.line});
            }
            case Tok::Sqrt:
            case Tok::Pow:
            case Tok::Abs: {
                Builtin fn = t.kind == Tok::Sqrt ? Builtin::Sqrt
                             : t.kind == Tok::Pow ? Builtin::Pow
                                                  : Builtin::Abs;
                advance();
                expect(Tok::LParen, "'(' after builtin");
                std::vector<ExprPtr> args;
                args.push_back(parse_expr());
                while (at(Tok::Comma)) { advance(); args.push_back(parse_expr()); }
                expect(Tok::RParen, "')'");
                size_t want = fn == Builtin::Pow ? 2 : 1;
                if (args.size() != want)
                    fail_at(t, std::string(to_string(fn)) + " takes " +
                                   std::to_string(want) + " argument(s)");
                return make_expr(Expr{CallNode{fn, std::move(args)}, t.line});
            }
            case Tok::Ident: {
                advance();
                RefNode ref;
                ref.stream = t.text;
                if (at(Tok::LBracket)) {
                    advance();
                    bool neg = false;
                    if (at(Tok::Minus)) { advance(); neg = true; }
                    else if (at(Tok::Plus)) advance();
                    const Token& off = expect(Tok::Int, "integer offset");
                    ref.offset = static_cast<int>(std::strtol(off.text.c_str(), nullptr, 10));
                    if (neg) ref.offset = -ref.offset;
                    expect(Tok::Comma, "',' and a boundary value");
                    ref.dflt = parse_literal_value();
                    expect(Tok::RBracket, "']'");
                }
                return make_expr(Expr{ref, t.line});
            }
            default:
                fail("expected an expression");
        }
    }
};

}  // namespace detail

inline Spec parse_spec(const std::string& source) {
    detail::Parser p(detail::lex(source));
    return p.parse_spec();
}

inline ExprPtr parse_expr_string(const std::string& source) {
    auto toks = detail::lex(source);
    // An expression has no newlines of its own; drop any the caller left in.
    std::erase_if(toks, [](const detail::Token& t) { return t.kind == detail::Tok::Newline; });
    detail::Parser p(std::move(toks));
    return p.parse_single_expr();
}

}  // namespace pslola
