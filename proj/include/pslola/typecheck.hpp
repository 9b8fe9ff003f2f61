#pragma once

// Type checking and output-type inference.
//
// Output streams may omit their type annotation; it is inferred from the
// defining expression.  Inference iterates to a fixpoint so mutually
// recursive outputs resolve (a recursive reference with a boundary value
// borrows the boundary literal's type provisionally, e.g. `count[-1, 0]`
// reads as int until the stream itself settles).  Integer literals are
// context-typed: `x * 2` is float when x is float.

#include <stdexcept>
#include <string>
#include <unordered_map>

#include "pslola/ast.hpp"
#include "pslola/parse.hpp"

namespace pslola {

struct TypeError : std::runtime_error {
    int line;
    TypeError(int line_, const std::string& msg)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

namespace detail {

// Inference lattice: concrete types plus "int literal" (promotable to float)
// and "unknown" (an output still being resolved).
enum class IT { Bool, Int, Float, IntLit, Unknown };

inline IT to_it(Type t) {
    switch (t) {
        case Type::Bool: return IT::Bool;
        case Type::Float: return IT::Float;
        case Type::Int: return IT::Int;
    }
    return IT::Int;
}

inline bool is_numeric(IT t) { return t == IT::Int || t == IT::Float || t == IT::IntLit; }

inline const char* it_name(IT t) {
    switch (t) {
        case IT::Bool: return "bool";
        case IT::Int: return "int";
        case IT::Float: return "float";
        case IT::IntLit: return "int";
        case IT::Unknown: return "<unresolved>";
    }
    return "?";
}

class Checker {
  public:
    explicit Checker(Spec& spec) : spec_(spec) {
        for (const auto& in : spec.inputs) env_[in.name] = to_it(in.type);
        for (const auto& o : spec.outputs)
            env_[o.name] = o.declared ? to_it(*o.declared) : IT::Unknown;
    }

    void run() {
        // Fixpoint: resolve output types until nothing changes.
        for (size_t pass = 0; pass <= spec_.outputs.size(); ++pass) {
            bool changed = false;
            for (auto& o : spec_.outputs) {
                if (env_[o.name] != IT::Unknown) continue;
                IT t = infer(*o.expr);
                if (t == IT::IntLit) t = IT::Int;
                if (t != IT::Unknown) {
                    env_[o.name] = t;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        for (auto& o : spec_.outputs) {
            if (env_[o.name] == IT::Unknown)
                throw TypeError(o.line, "cannot infer type of output '" + o.name +
                                            "'; add a type annotation");
        }
        // Strict pass with all stream types known.
        for (auto& o : spec_.outputs) {
            IT t = check(*o.expr);
            IT want = env_[o.name];
            if (t == IT::IntLit) t = IT::Int;
            if (t != want && !(t == IT::Int && want == IT::Float))
                throw TypeError(o.line, "output '" + o.name + "' declared " + it_name(want) +
                                            " but defined by a " + it_name(t) + " expression");
            o.type = want == IT::Bool ? Type::Bool : want == IT::Float ? Type::Float : Type::Int;
        }
    }

  private:
    Spec& spec_;
    std::unordered_map<std::string, IT> env_;

    // Lenient inference: unknowns propagate, mismatches collapse to Unknown
    // (the strict pass reports them once every stream type is settled).
    IT infer(const Expr& e) {
        if (const auto* c = std::get_if<ConstNode>(&e.node)) {
            switch (type_of(c->value)) {
                case Type::Bool: return IT::Bool;
                case Type::Float: return IT::Float;
                case Type::Int: return IT::IntLit;
            }
        }
        if (const auto* r = std::get_if<RefNode>(&e.node)) {
            auto it = env_.find(r->stream);
            if (it == env_.end()) return IT::Unknown;  // strict pass reports
            if (it->second != IT::Unknown) return it->second;
            if (r->dflt) {
                switch (type_of(*r->dflt)) {
                    case Type::Bool: return IT::Bool;
                    case Type::Float: return IT::Float;
                    case Type::Int: return IT::IntLit;
                }
            }
            return IT::Unknown;
        }
        if (const auto* u = std::get_if<UnaryNode>(&e.node)) {
            if (u->op == UnOp::Not) return IT::Bool;
            return infer(*u->operand);
        }
        if (const auto* b = std::get_if<BinaryNode>(&e.node)) {
            switch (b->op) {
                case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
                case BinOp::Eq: case BinOp::Ne:
                case BinOp::And: case BinOp::Or:
                    return IT::Bool;
                case BinOp::Mod:
                    return IT::Int;
                default:
                    return join(infer(*b->lhs), infer(*b->rhs));
            }
        }
        if (const auto* f = std::get_if<CallNode>(&e.node)) {
            if (f->fn == Builtin::Abs) return infer(*f->args[0]);
            return IT::Float;
        }
        if (const auto* t = std::get_if<IteNode>(&e.node)) {
            return join(infer(*t->then_branch), infer(*t->else_branch));
        }
        return IT::Unknown;
    }

    static IT join(IT a, IT b) {
        if (a == b) return a;
        if (a == IT::Unknown) return b;
        if (b == IT::Unknown) return a;
        if (a == IT::IntLit && is_numeric(b)) return b;
        if (b == IT::IntLit && is_numeric(a)) return a;
        if ((a == IT::Int && b == IT::Float) || (a == IT::Float && b == IT::Int))
            return IT::Float;  // lenient; the strict pass rejects non-literal mixing
        return IT::Unknown;
    }

    [[noreturn]] static void mismatch(const Expr& e, const std::string& msg) {
        throw TypeError(e.line, msg);
    }

    IT require_numeric(const Expr& parent, const Expr& operand, const char* what) {
        IT t = check(operand);
        if (!is_numeric(t))
            mismatch(parent, std::string(what) + " requires a numeric operand, got " +
                                 it_name(t));
        return t;
    }

    // Strict check: every stream type is known; mismatches throw.
    IT check(const Expr& e) {
        if (const auto* c = std::get_if<ConstNode>(&e.node)) {
            switch (type_of(c->value)) {
                case Type::Bool: return IT::Bool;
                case Type::Float: return IT::Float;
                case Type::Int: return IT::IntLit;
            }
        }
        if (const auto* r = std::get_if<RefNode>(&e.node)) {
            auto it = env_.find(r->stream);
            if (it == env_.end())
                mismatch(e, "reference to undeclared stream '" + r->stream + "'");
            IT t = it->second;
            if (r->dflt) {
                IT dt = to_it(type_of(*r->dflt));
                bool ok = dt == t || (dt == IT::Int && t == IT::Float);
                if (!ok)
                    mismatch(e, "boundary value " + to_string(*r->dflt) + " does not match " +
                                    it_name(t) + " stream '" + r->stream + "'");
            }
            return t;
        }
        if (const auto* u = std::get_if<UnaryNode>(&e.node)) {
            if (u->op == UnOp::Not) {
                if (check(*u->operand) != IT::Bool)
                    mismatch(e, "'!' requires a bool operand");
                return IT::Bool;
            }
            return require_numeric(e, *u->operand, "unary '-'");
        }
        if (const auto* b = std::get_if<BinaryNode>(&e.node)) {
            switch (b->op) {
                case BinOp::And: case BinOp::Or: {
                    if (check(*b->lhs) != IT::Bool || check(*b->rhs) != IT::Bool)
                        mismatch(e, std::string("'") + to_string(b->op) +
                                        "' requires bool operands");
                    return IT::Bool;
                }
                case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: {
                    require_numeric(e, *b->lhs, to_string(b->op));
                    require_numeric(e, *b->rhs, to_string(b->op));
                    return IT::Bool;
                }
                case BinOp::Eq: case BinOp::Ne: {
                    IT l = check(*b->lhs), r = check(*b->rhs);
                    if (!((is_numeric(l) && is_numeric(r)) ||
                          (l == IT::Bool && r == IT::Bool)))
                        mismatch(e, std::string("'") + to_string(b->op) +
                                        "' operands have incompatible types (" + it_name(l) +
                                        " vs " + it_name(r) + ")");
                    return IT::Bool;
                }
                case BinOp::Mod: {
                    IT l = check(*b->lhs), r = check(*b->rhs);
                    if (l == IT::Float || r == IT::Float || !is_numeric(l) || !is_numeric(r))
                        mismatch(e, "'%' requires int operands");
                    return IT::Int;
                }
                default: {
                    IT l = require_numeric(e, *b->lhs, to_string(b->op));
                    IT r = require_numeric(e, *b->rhs, to_string(b->op));
                    if ((l == IT::Int && r == IT::Float) || (l == IT::Float && r == IT::Int))
                        mismatch(e, std::string("'") + to_string(b->op) +
                                        "' mixes int and float streams; use float streams "
                                        "or literals");
                    return join(l, r);
                }
            }
        }
        if (const auto* f = std::get_if<CallNode>(&e.node)) {
            for (const auto& a : f->args)
                require_numeric(e, *a, to_string(f->fn));
            if (f->fn == Builtin::Abs) {
                IT t = check(*f->args[0]);
                return t == IT::IntLit ? IT::Int : t;
            }
            return IT::Float;
        }
        if (const auto* t = std::get_if<IteNode>(&e.node)) {
            if (check(*t->cond) != IT::Bool) mismatch(e, "ite condition must be bool");
            IT a = check(*t->then_branch), b = check(*t->else_branch);
            IT j = join(a, b);
            if (j == IT::Unknown)
                mismatch(e, std::string("ite branches have incompatible types (") +
                                it_name(a) + " vs " + it_name(b) + ")");
            return j;
        }
        throw TypeError(e.line, "malformed expression");
    }
};

}  // namespace detail

// Resolves every output's type in place; throws TypeError on any mismatch.
inline void type_check(Spec& spec) {
    detail::Checker c(spec);
    c.run();
}

inline Spec parse_and_check(const std::string& source) {
    Spec spec = parse_spec(source);
    type_check(spec);
    return spec;
}

}  // namespace pslola
