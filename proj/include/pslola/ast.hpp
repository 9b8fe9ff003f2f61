#pragma once

// Abstract syntax for stream specifications.  A specification declares typed
// input streams and output streams defined by expressions over stream
// references with integer offsets, e.g. `x[-1, 0]` for "x one step earlier,
// defaulting to 0 past the trace boundary".

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pslola/value.hpp"

namespace pslola {

enum class BinOp {
    Add, Sub, Mul, Div, Mod,
    Lt, Le, Gt, Ge, Eq, Ne,
    And, Or,
};

enum class UnOp {
    Neg,
    Not,
};

enum class Builtin {
    Sqrt,  // sqrt(x), float result
    Pow,   // pow(x, y), float result
    Abs,   // abs(x), preserves the argument's numeric type
};

inline const char* to_string(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
    }
    return "?";
}

inline const char* to_string(Builtin b) {
    switch (b) {
        case Builtin::Sqrt: return "sqrt";
        case Builtin::Pow: return "pow";
        case Builtin::Abs: return "abs";
    }
    return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ConstNode {
    Value value;
};

// Stream reference, bare (`x`, offset 0, boundary value is the stream type's
// default) or offset (`x[p, c]`, boundary value c).
struct RefNode {
    std::string stream;
    int offset = 0;
    std::optional<Value> dflt;  // set iff written with brackets
};

struct UnaryNode {
    UnOp op;
    ExprPtr operand;
};

struct BinaryNode {
    BinOp op;
    ExprPtr lhs, rhs;
};

struct CallNode {
    Builtin fn;
    std::vector<ExprPtr> args;
};

struct IteNode {
    ExprPtr cond, then_branch, else_branch;
};

struct Expr {
    std::variant<ConstNode, RefNode, UnaryNode, BinaryNode, CallNode, IteNode> node;
    int line = 0;  // 1-based source line, 0 when synthesized
};

inline ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

inline ExprPtr make_const(Value v, int line = 0) {
    return make_expr(Expr{ConstNode{std::move(v)}, line});
}

struct InputDecl {
    std::string name;
    Type type = Type::Int;
    bool is_unsigned = false;  // declared `uint`: int values, checked >= 0 at load
    int line = 0;
};

struct OutputDecl {
    std::string name;
    std::optional<Type> declared;  // explicit annotation, if any
    ExprPtr expr;
    Type type = Type::Int;  // resolved by the type checker
    int line = 0;
};

struct Spec {
    std::vector<InputDecl> inputs;
    std::vector<OutputDecl> outputs;
    std::unordered_map<std::string, int> input_index;
    std::unordered_map<std::string, int> output_index;

    bool is_input(const std::string& name) const { return input_index.count(name) != 0; }
    bool is_output(const std::string& name) const { return output_index.count(name) != 0; }
    bool has_stream(const std::string& name) const { return is_input(name) || is_output(name); }

    Type stream_type(const std::string& name) const {
        if (auto it = input_index.find(name); it != input_index.end())
            return inputs[it->second].type;
        if (auto it = output_index.find(name); it != output_index.end())
            return outputs[it->second].type;
        throw std::runtime_error("unknown stream: " + name);
    }

    const OutputDecl& output(const std::string& name) const {
        return outputs.at(output_index.at(name));
    }

    void reindex() {
        input_index.clear();
        output_index.clear();
        for (int i = 0; i < static_cast<int>(inputs.size()); ++i) input_index[inputs[i].name] = i;
        for (int i = 0; i < static_cast<int>(outputs.size()); ++i) output_index[outputs[i].name] = i;
    }
};

// ---------------------------------------------------------------------------
// Canonical printing.  Parenthesization follows the parser's precedence table
// so printing and reparsing an expression yields the same tree.

inline int precedence(BinOp op) {
    switch (op) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq: case BinOp::Ne: return 3;
        case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 4;
        case BinOp::Add: case BinOp::Sub: return 5;
        case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 6;
    }
    return 0;
}

inline void print_expr(std::string& out, const Expr& e);

inline void print_child(std::string& out, const Expr& e, int min_prec) {
    bool parens = false;
    if (const auto* b = std::get_if<BinaryNode>(&e.node)) parens = precedence(b->op) < min_prec;
    if (parens) out += "(";
    print_expr(out, e);
    if (parens) out += ")";
}

inline void print_expr(std::string& out, const Expr& e) {
    if (const auto* c = std::get_if<ConstNode>(&e.node)) {
        out += to_string(c->value);
    } else if (const auto* r = std::get_if<RefNode>(&e.node)) {
        out += r->stream;
        if (r->dflt) {
            out += "[" + std::to_string(r->offset) + ", " + to_string(*r->dflt) + "]";
        }
    } else if (const auto* u = std::get_if<UnaryNode>(&e.node)) {
        out += u->op == UnOp::Neg ? "-" : "!";
        bool parens = !std::holds_alternative<ConstNode>(u->operand->node) &&
                      !std::holds_alternative<RefNode>(u->operand->node) &&
                      !std::holds_alternative<CallNode>(u->operand->node) &&
                      !std::holds_alternative<IteNode>(u->operand->node);
        if (parens) out += "(";
        print_expr(out, *u->operand);
        if (parens) out += ")";
    } else if (const auto* b = std::get_if<BinaryNode>(&e.node)) {
        int prec = precedence(b->op);
        print_child(out, *b->lhs, prec);
        out += " ";
        out += to_string(b->op);
        out += " ";
        // Right child of a left-associative operator needs parens at equal
        // precedence: a - (b - c).
        print_child(out, *b->rhs, prec + 1);
    } else if (const auto* f = std::get_if<CallNode>(&e.node)) {
        out += to_string(f->fn);
        out += "(";
        for (size_t i = 0; i < f->args.size(); ++i) {
            if (i) out += ", ";
            print_expr(out, *f->args[i]);
        }
        out += ")";
    } else if (const auto* t = std::get_if<IteNode>(&e.node)) {
        out += "ite(";
        print_expr(out, *t->cond);
        out += ", ";
        print_expr(out, *t->then_branch);
        out += ", ";
        print_expr(out, *t->else_branch);
        out += ")";
    }
}

inline std::string to_string(const Expr& e) {
    std::string out;
    print_expr(out, e);
    return out;
}

inline std::string to_string(const Spec& spec) {
    std::string out;
    for (const auto& in : spec.inputs) {
        out += "input " + in.name + " : " + (in.is_unsigned ? "uint" : to_string(in.type));
        out += "\n";
    }
    for (const auto& o : spec.outputs) {
        out += "output " + o.name;
        if (o.declared) out += std::string(" : ") + to_string(*o.declared);
        out += " := " + to_string(*o.expr) + "\n";
    }
    return out;
}

}  // namespace pslola
