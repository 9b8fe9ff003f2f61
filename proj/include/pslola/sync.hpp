#pragma once

// Synchronous (perfect-clock) semantics: a dense trace assigns one value per
// stream per position 0..n, and each output position is evaluated by demand
// with offsets resolved positionally; a reference past either trace boundary
// yields its declared boundary value.  Evaluation terminates on any
// well-formed specification because every recursion step moves along a
// nonzero-total dependency walk.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pslola/ast.hpp"
#include "pslola/typecheck.hpp"

namespace pslola {

struct SyncTrace {
    int n = -1;  // positions run 0..n
    std::map<std::string, std::vector<Value>> values;

    int length() const { return n + 1; }
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Value arithmetic shared by every engine.

namespace detail {

inline Value promote(const Value& v, bool to_float) {
    if (to_float && v.index() == 0)
        return Value{static_cast<double>(std::get<std::int64_t>(v))};
    return v;
}

inline bool as_bool(const Value& v) {
    if (v.index() != 2) throw EvalError("expected a bool value");
    return std::get<bool>(v);
}

}  // namespace detail

inline Value apply_unop(UnOp op, const Value& v) {
    if (op == UnOp::Not) return Value{!detail::as_bool(v)};
    if (v.index() == 1) return Value{-std::get<double>(v)};
    if (v.index() == 0) return Value{-std::get<std::int64_t>(v)};
    throw EvalError("cannot negate a bool");
}

inline Value apply_binop(BinOp op, const Value& a, const Value& b) {
    using detail::as_bool;
    switch (op) {
        case BinOp::And: return Value{as_bool(a) && as_bool(b)};
        case BinOp::Or: return Value{as_bool(a) || as_bool(b)};
        default: break;
    }
    if (op == BinOp::Eq || op == BinOp::Ne) {
        if (a.index() == 2 || b.index() == 2) {
            bool eq = as_bool(a) == as_bool(b);
            return Value{op == BinOp::Eq ? eq : !eq};
        }
    }
    bool use_float = a.index() == 1 || b.index() == 1;
    Value x = detail::promote(a, use_float);
    Value y = detail::promote(b, use_float);
    if (use_float) {
        double l = std::get<double>(x), r = std::get<double>(y);
        switch (op) {
            case BinOp::Add: return Value{l + r};
            case BinOp::Sub: return Value{l - r};
            case BinOp::Mul: return Value{l * r};
            case BinOp::Div: return Value{l / r};
            case BinOp::Mod: throw EvalError("'%' on float values");
            case BinOp::Lt: return Value{l < r};
            case BinOp::Le: return Value{l <= r};
            case BinOp::Gt: return Value{l > r};
            case BinOp::Ge: return Value{l >= r};
            case BinOp::Eq: return Value{l == r};
            case BinOp::Ne: return Value{l != r};
            default: throw EvalError("bad float operator");
        }
    }
    std::int64_t l = std::get<std::int64_t>(x), r = std::get<std::int64_t>(y);
    switch (op) {
        case BinOp::Add: return Value{l + r};
        case BinOp::Sub: return Value{l - r};
        case BinOp::Mul: return Value{l * r};
        // Division and remainder by zero are defined as 0 so that engines
        // exploring speculative placements never trap; README documents this.
        case BinOp::Div: return Value{r == 0 ? std::int64_t{0} : l / r};
        case BinOp::Mod: return Value{r == 0 ? std::int64_t{0} : l % r};
        case BinOp::Lt: return Value{l < r};
        case BinOp::Le: return Value{l <= r};
        case BinOp::Gt: return Value{l > r};
        case BinOp::Ge: return Value{l >= r};
        case BinOp::Eq: return Value{l == r};
        case BinOp::Ne: return Value{l != r};
        default: throw EvalError("bad int operator");
    }
}

inline Value apply_call(Builtin fn, const std::vector<Value>& args) {
    switch (fn) {
        case Builtin::Sqrt: return Value{std::sqrt(as_double(args[0]))};
        case Builtin::Pow: return Value{std::pow(as_double(args[0]), as_double(args[1]))};
        case Builtin::Abs:
            if (args[0].index() == 0)
                return Value{std::abs(std::get<std::int64_t>(args[0]))};
            return Value{std::fabs(as_double(args[0]))};
    }
    throw EvalError("bad builtin");
}

// Boundary value of a reference: its declared `[p, c]` literal, or the
// stream type's default for a bare reference.
inline Value boundary_value(const Spec& spec, const RefNode& ref) {
    if (ref.dflt) {
        // An int literal annotating a float stream reads as float.
        if (spec.stream_type(ref.stream) == Type::Float && ref.dflt->index() == 0)
            return Value{static_cast<double>(std::get<std::int64_t>(*ref.dflt))};
        return *ref.dflt;
    }
    return default_value(spec.stream_type(ref.stream));
}

// ---------------------------------------------------------------------------

class SyncEvaluator {
  public:
    SyncEvaluator(const Spec& spec, const SyncTrace& trace) : spec_(spec), trace_(trace) {
        for (const auto& o : spec.outputs) {
            memo_[o.name].assign(trace.length(), std::nullopt);
            busy_[o.name].assign(trace.length(), 0);
        }
    }

    Value value(const std::string& stream, int j) {
        if (spec_.is_input(stream)) {
            auto it = trace_.values.find(stream);
            if (it == trace_.values.end())
                throw EvalError("trace has no values for input stream '" + stream + "'");
            return it->second.at(static_cast<size_t>(j));
        }
        auto& slot = memo_.at(stream)[static_cast<size_t>(j)];
        if (slot) return *slot;
        auto& busy = busy_.at(stream)[static_cast<size_t>(j)];
        if (busy)
            throw EvalError("evaluation cycle at " + stream + "(" + std::to_string(j) +
                            "); specification is not well-formed");
        busy = 1;
        Value v = eval(*spec_.output(stream).expr, j);
        // Output values of float streams may be produced by int arithmetic
        // over literals; normalize so downstream sets are homogeneous.
        if (spec_.stream_type(stream) == Type::Float && v.index() == 0)
            v = Value{static_cast<double>(std::get<std::int64_t>(v))};
        busy = 0;
        slot = v;
        return v;
    }

    Value eval(const Expr& e, int j) {
        if (const auto* c = std::get_if<ConstNode>(&e.node)) return c->value;
        if (const auto* r = std::get_if<RefNode>(&e.node)) {
            int k = j + r->offset;
            if (k < 0 || k > trace_.n) return boundary_value(spec_, *r);
            return value(r->stream, k);
        }
        if (const auto* u = std::get_if<UnaryNode>(&e.node))
            return apply_unop(u->op, eval(*u->operand, j));
        if (const auto* b = std::get_if<BinaryNode>(&e.node)) {
            // Short-circuit so a bool chain never evaluates operands it does
            // not need (mirrors the rewriting engine's folding).
            if (b->op == BinOp::And) {
                if (!detail::as_bool(eval(*b->lhs, j))) return Value{false};
                return Value{detail::as_bool(eval(*b->rhs, j))};
            }
            if (b->op == BinOp::Or) {
                if (detail::as_bool(eval(*b->lhs, j))) return Value{true};
                return Value{detail::as_bool(eval(*b->rhs, j))};
            }
            return apply_binop(b->op, eval(*b->lhs, j), eval(*b->rhs, j));
        }
        if (const auto* f = std::get_if<CallNode>(&e.node)) {
            std::vector<Value> args;
            for (const auto& a : f->args) args.push_back(eval(*a, j));
            return apply_call(f->fn, args);
        }
        if (const auto* t = std::get_if<IteNode>(&e.node))
            return detail::as_bool(eval(*t->cond, j)) ? eval(*t->then_branch, j)
                                                      : eval(*t->else_branch, j);
        throw EvalError("malformed expression");
    }

  private:
    const Spec& spec_;
    const SyncTrace& trace_;
    std::map<std::string, std::vector<std::optional<Value>>> memo_;
    std::map<std::string, std::vector<char>> busy_;
};

// Evaluates all outputs over a dense trace; result vectors have trace length.
inline std::map<std::string, std::vector<Value>> evaluate_sync(const Spec& spec,
                                                               const SyncTrace& trace) {
    SyncEvaluator ev(spec, trace);
    std::map<std::string, std::vector<Value>> out;
    for (const auto& o : spec.outputs) {
        auto& vec = out[o.name];
        vec.reserve(trace.length());
        for (int j = 0; j <= trace.n; ++j) vec.push_back(ev.value(o.name, j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Running folds.  These are the closed forms of the recursive counting
// specifications and serve as independent cross-checks in tests.

enum class FoldKind { Count, Sum, Max };

inline std::vector<Value> fold_incremental(FoldKind kind, const std::vector<Value>& values) {
    std::vector<Value> out;
    out.reserve(values.size());
    switch (kind) {
        case FoldKind::Count: {
            std::int64_t acc = 0;
            for (const auto& v : values) {
                if (detail::as_bool(v)) ++acc;
                out.push_back(Value{acc});
            }
            break;
        }
        case FoldKind::Sum: {
            bool use_float = !values.empty() && values.front().index() == 1;
            if (use_float) {
                double acc = 0;
                for (const auto& v : values) { acc += as_double(v); out.push_back(Value{acc}); }
            } else {
                std::int64_t acc = 0;
                for (const auto& v : values) {
                    acc += std::get<std::int64_t>(v);
                    out.push_back(Value{acc});
                }
            }
            break;
        }
        case FoldKind::Max: {
            bool first = true;
            Value acc;
            for (const auto& v : values) {
                if (first) { acc = v; first = false; }
                else if (ValueLess{}(acc, v)) acc = v;
                out.push_back(acc);
            }
            break;
        }
    }
    return out;
}

}  // namespace pslola
