#pragma once

// Windowed possible-worlds semantics: a cheap over-approximation that never
// enumerates assignments.  Every input reference at position k is read as
// the SET of densified values inside k's skew window; operators lift
// pointwise over cross products; an ite whose condition set contains both
// truth values unions both branches; out-of-range references collapse to
// their boundary value.  Output references recurse at the shifted position.
//
// On counter-like specifications the windowed result can strictly contain
// the assignment-enumeration reference result (uncertainty re-enters at
// every recursion step instead of being resolved per world).  Tests assert
// reference within windowed on every bundled fixture.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pslola/interleave.hpp"

namespace pslola {

namespace detail {

class WindowedEvaluator {
  public:
    WindowedEvaluator(const Spec& spec, const DistributedStream& ds, int eps)
        : spec_(spec), eps_(eps), n_(ds.n), dense_(densify(ds, spec)) {
        for (const auto& o : spec.outputs) {
            memo_[o.name].assign(static_cast<size_t>(n_) + 1, std::nullopt);
            busy_[o.name].assign(static_cast<size_t>(n_) + 1, 0);
        }
    }

    ValueSet output_set(const std::string& name, int j) {
        auto& slot = memo_.at(name)[static_cast<size_t>(j)];
        if (slot) return *slot;
        auto& busy = busy_.at(name)[static_cast<size_t>(j)];
        if (busy)
            throw EvalError("windowed evaluation cycle at " + name + "(" + std::to_string(j) +
                            "); specification is not well-formed");
        busy = 1;
        ValueSet s = eval_set(*spec_.output(name).expr, j);
        if (spec_.stream_type(name) == Type::Float) {
            ValueSet promoted;
            for (const auto& v : s)
                promoted.insert(v.index() == 0
                                    ? Value{static_cast<double>(std::get<std::int64_t>(v))}
                                    : v);
            s = std::move(promoted);
        }
        busy = 0;
        slot = s;
        return s;
    }

    ValueSet eval_set(const Expr& e, int j) {
        if (const auto* c = std::get_if<ConstNode>(&e.node)) return {c->value};
        if (const auto* r = std::get_if<RefNode>(&e.node)) {
            int k = j + r->offset;
            if (k < 0 || k > n_) return {boundary_value(spec_, *r)};
            if (spec_.is_input(r->stream)) {
                auto [lo, hi] = candidate_times(k, eps_, n_);
                ValueSet s;
                const auto& vals = dense_.values.at(r->stream);
                for (int t = lo; t <= hi; ++t) s.insert(vals[static_cast<size_t>(t)]);
                return s;
            }
            return output_set(r->stream, k);
        }
        if (const auto* u = std::get_if<UnaryNode>(&e.node)) {
            ValueSet s;
            for (const auto& v : eval_set(*u->operand, j)) s.insert(apply_unop(u->op, v));
            return s;
        }
        if (const auto* b = std::get_if<BinaryNode>(&e.node)) {
            ValueSet l = eval_set(*b->lhs, j);
            ValueSet r2 = eval_set(*b->rhs, j);
            ValueSet s;
            for (const auto& x : l)
                for (const auto& y : r2) s.insert(apply_binop(b->op, x, y));
            return s;
        }
        if (const auto* f = std::get_if<CallNode>(&e.node)) {
            ValueSet s;
            if (f->args.size() == 1) {
                for (const auto& x : eval_set(*f->args[0], j))
                    s.insert(apply_call(f->fn, {x}));
            } else {
                ValueSet a = eval_set(*f->args[0], j);
                ValueSet b2 = eval_set(*f->args[1], j);
                for (const auto& x : a)
                    for (const auto& y : b2) s.insert(apply_call(f->fn, {x, y}));
            }
            return s;
        }
        if (const auto* t = std::get_if<IteNode>(&e.node)) {
            ValueSet c = eval_set(*t->cond, j);
            bool has_true = c.count(Value{true}) != 0;
            bool has_false = c.count(Value{false}) != 0;
            ValueSet s;
            if (has_true)
                for (const auto& v : eval_set(*t->then_branch, j)) s.insert(v);
            if (has_false)
                for (const auto& v : eval_set(*t->else_branch, j)) s.insert(v);
            return s;
        }
        throw EvalError("malformed expression");
    }

  private:
    const Spec& spec_;
    int eps_;
    int n_;
    SyncTrace dense_;
    std::map<std::string, std::vector<std::optional<ValueSet>>> memo_;
    std::map<std::string, std::vector<char>> busy_;
};

}  // namespace detail

inline std::map<std::string, std::vector<ValueSet>> evaluate_ps_windowed(
    const Spec& spec, const DistributedStream& ds, int eps) {
    detail::WindowedEvaluator ev(spec, ds, eps);
    std::map<std::string, std::vector<ValueSet>> out;
    for (const auto& o : spec.outputs) {
        auto& vec = out[o.name];
        for (int j = 0; j <= ds.n; ++j) vec.push_back(ev.output_set(o.name, j));
    }
    return out;
}

struct SemanticsComparison {
    bool equal = true;                     // identical sets everywhere
    bool reference_within_windowed = true; // soundness of the approximation
    std::vector<std::string> differences;  // keys where the engines disagree
};

inline SemanticsComparison compare_semantics(const Spec& spec, const DistributedStream& ds,
                                             int eps) {
    SemanticsComparison cmp;
    PsResult ref = evaluate_ps_reference(spec, ds, eps);
    auto win = evaluate_ps_windowed(spec, ds, eps);
    for (const auto& o : spec.outputs) {
        for (int j = 0; j <= ds.n; ++j) {
            const ValueSet& r = ref.sets.at(o.name)[static_cast<size_t>(j)];
            const ValueSet& w = win.at(o.name)[static_cast<size_t>(j)];
            if (!set_equal(r, w)) {
                cmp.equal = false;
                cmp.differences.push_back(o.name + "(" + std::to_string(j) + "): reference " +
                                          to_string(r) + " vs windowed " + to_string(w));
            }
            if (!is_subset(r, w)) cmp.reference_within_windowed = false;
        }
    }
    return cmp;
}

}  // namespace pslola
