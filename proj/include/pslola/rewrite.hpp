#pragma once

// Symbolic rewriting for decentralized monitoring.
//
// A monitor that has only read part of the trace evaluates an output
// position by instantiating its defining equation at absolute positions
// (the associated equation), eagerly substituting every value it has
// observed, and folding constants.  What remains is either a resolved value
// or a pending equation whose unresolved references name exactly the events
// (or output positions) the monitor is missing.  Pending entries carry the
// unsubstituted original alongside the rewritten form: a receiver aligns
// the two trees and extracts the sender's substitutions as bindings, which
// is how values cross monitors without ever shipping raw reads.
//
// Position handling during instantiation: references outside the horizon
// fold to their declared boundary value; in-range positions where the input
// stream has no event (the event schedule is shared knowledge, values are
// not) fold to the boundary value as well; everything else stays symbolic.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pslola/stream.hpp"

namespace pslola {

struct SymExpr;
using SymPtr = std::shared_ptr<const SymExpr>;

struct SymConst {
    Value value;
};

// Reference to stream `stream` at absolute position `pos`.  `discharge` is
// the value substituted if the reference survives to the end of the trace.
struct SymRef {
    std::string stream;
    int pos = 0;
    Value discharge;
    bool is_output = false;
};

struct SymUnary {
    UnOp op;
    SymPtr operand;
};

struct SymBinary {
    BinOp op;
    SymPtr lhs, rhs;
};

struct SymCall {
    Builtin fn;
    std::vector<SymPtr> args;
};

struct SymIte {
    SymPtr cond, then_branch, else_branch;
};

struct SymExpr {
    std::variant<SymConst, SymRef, SymUnary, SymBinary, SymCall, SymIte> node;
};

inline SymPtr make_sym(SymExpr e) { return std::make_shared<const SymExpr>(std::move(e)); }
inline SymPtr sym_const(Value v) { return make_sym(SymExpr{SymConst{std::move(v)}}); }

inline std::optional<Value> as_const(const SymExpr& e) {
    if (const auto* c = std::get_if<SymConst>(&e.node)) return c->value;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Instantiation.

inline SymPtr make_symbolic_expr(const Spec& spec, const DistributedStream& ds, const Expr& e,
                                 int j) {
    if (const auto* c = std::get_if<ConstNode>(&e.node)) return sym_const(c->value);
    if (const auto* r = std::get_if<RefNode>(&e.node)) {
        int k = j + r->offset;
        Value boundary = boundary_value(spec, *r);
        if (k < 0 || k > ds.n) return sym_const(boundary);
        if (spec.is_input(r->stream)) {
            auto it = ds.events.find(r->stream);
            bool exists = false;
            if (it != ds.events.end())
                for (const auto& [sigma, v] : it->second)
                    if (sigma == k) { exists = true; break; }
            if (!exists) return sym_const(boundary);
            return make_sym(SymExpr{SymRef{r->stream, k, boundary, false}});
        }
        return make_sym(SymExpr{SymRef{r->stream, k, boundary, true}});
    }
    if (const auto* u = std::get_if<UnaryNode>(&e.node))
        return make_sym(SymExpr{SymUnary{u->op, make_symbolic_expr(spec, ds, *u->operand, j)}});
    if (const auto* b = std::get_if<BinaryNode>(&e.node))
        return make_sym(SymExpr{SymBinary{b->op, make_symbolic_expr(spec, ds, *b->lhs, j),
                                          make_symbolic_expr(spec, ds, *b->rhs, j)}});
    if (const auto* f = std::get_if<CallNode>(&e.node)) {
        std::vector<SymPtr> args;
        for (const auto& a : f->args) args.push_back(make_symbolic_expr(spec, ds, *a, j));
        return make_sym(SymExpr{SymCall{f->fn, std::move(args)}});
    }
    const auto* t = std::get_if<IteNode>(&e.node);
    return make_sym(SymExpr{SymIte{make_symbolic_expr(spec, ds, *t->cond, j),
                                   make_symbolic_expr(spec, ds, *t->then_branch, j),
                                   make_symbolic_expr(spec, ds, *t->else_branch, j)}});
}

// Associated equation of output `var` at position j.
inline SymPtr make_symbolic(const Spec& spec, const DistributedStream& ds,
                            const std::string& var, int j) {
    return make_symbolic_expr(spec, ds, *spec.output(var).expr, j);
}

// ---------------------------------------------------------------------------
// Substitution and simplification.

struct SymKey {
    bool is_output = false;
    std::string stream;
    int pos = 0;
    auto operator<=>(const SymKey&) const = default;
};

using Bindings = std::map<SymKey, Value>;

inline SymPtr substitute(const SymPtr& e, const Bindings& b) {
    if (std::holds_alternative<SymConst>(e->node)) return e;
    if (const auto* r = std::get_if<SymRef>(&e->node)) {
        auto it = b.find(SymKey{r->is_output, r->stream, r->pos});
        if (it != b.end()) return sym_const(it->second);
        return e;
    }
    if (const auto* u = std::get_if<SymUnary>(&e->node)) {
        SymPtr op = substitute(u->operand, b);
        if (op == u->operand) return e;
        return make_sym(SymExpr{SymUnary{u->op, op}});
    }
    if (const auto* bin = std::get_if<SymBinary>(&e->node)) {
        SymPtr l = substitute(bin->lhs, b), r = substitute(bin->rhs, b);
        if (l == bin->lhs && r == bin->rhs) return e;
        return make_sym(SymExpr{SymBinary{bin->op, l, r}});
    }
    if (const auto* f = std::get_if<SymCall>(&e->node)) {
        std::vector<SymPtr> args;
        bool same = true;
        for (const auto& a : f->args) {
            args.push_back(substitute(a, b));
            same = same && args.back() == a;
        }
        if (same) return e;
        return make_sym(SymExpr{SymCall{f->fn, std::move(args)}});
    }
    const auto* t = std::get_if<SymIte>(&e->node);
    SymPtr c = substitute(t->cond, b);
    SymPtr th = substitute(t->then_branch, b);
    SymPtr el = substitute(t->else_branch, b);
    if (c == t->cond && th == t->then_branch && el == t->else_branch) return e;
    return make_sym(SymExpr{SymIte{c, th, el}});
}

// Constant folding plus ite-condition folding, nothing else (no algebraic
// identities), so the result is stable and predictable.  Idempotent.
inline SymPtr simplify(const SymPtr& e) {
    if (std::holds_alternative<SymConst>(e->node) || std::holds_alternative<SymRef>(e->node))
        return e;
    if (const auto* u = std::get_if<SymUnary>(&e->node)) {
        SymPtr op = simplify(u->operand);
        if (auto v = as_const(*op)) return sym_const(apply_unop(u->op, *v));
        if (op == u->operand) return e;
        return make_sym(SymExpr{SymUnary{u->op, op}});
    }
    if (const auto* bin = std::get_if<SymBinary>(&e->node)) {
        SymPtr l = simplify(bin->lhs), r = simplify(bin->rhs);
        auto lv = as_const(*l), rv = as_const(*r);
        if (lv && rv) return sym_const(apply_binop(bin->op, *lv, *rv));
        if (l == bin->lhs && r == bin->rhs) return e;
        return make_sym(SymExpr{SymBinary{bin->op, l, r}});
    }
    if (const auto* f = std::get_if<SymCall>(&e->node)) {
        std::vector<SymPtr> args;
        std::vector<Value> vals;
        bool all_const = true, same = true;
        for (const auto& a : f->args) {
            args.push_back(simplify(a));
            same = same && args.back() == a;
            if (auto v = as_const(*args.back())) vals.push_back(*v);
            else all_const = false;
        }
        if (all_const) return sym_const(apply_call(f->fn, vals));
        if (same) return e;
        return make_sym(SymExpr{SymCall{f->fn, std::move(args)}});
    }
    const auto* t = std::get_if<SymIte>(&e->node);
    SymPtr c = simplify(t->cond);
    if (auto cv = as_const(*c)) {
        if (cv->index() != 2) throw EvalError("ite condition folded to a non-bool");
        return std::get<bool>(*cv) ? simplify(t->then_branch) : simplify(t->else_branch);
    }
    SymPtr th = simplify(t->then_branch);
    SymPtr el = simplify(t->else_branch);
    if (c == t->cond && th == t->then_branch && el == t->else_branch) return e;
    return make_sym(SymExpr{SymIte{c, th, el}});
}

inline void collect_sym_refs(const SymPtr& e, std::vector<SymRef>& out) {
    if (const auto* r = std::get_if<SymRef>(&e->node)) {
        out.push_back(*r);
    } else if (const auto* u = std::get_if<SymUnary>(&e->node)) {
        collect_sym_refs(u->operand, out);
    } else if (const auto* b = std::get_if<SymBinary>(&e->node)) {
        collect_sym_refs(b->lhs, out);
        collect_sym_refs(b->rhs, out);
    } else if (const auto* f = std::get_if<SymCall>(&e->node)) {
        for (const auto& a : f->args) collect_sym_refs(a, out);
    } else if (const auto* t = std::get_if<SymIte>(&e->node)) {
        collect_sym_refs(t->cond, out);
        collect_sym_refs(t->then_branch, out);
        collect_sym_refs(t->else_branch, out);
    }
}

inline std::vector<SymRef> collect_sym_refs(const SymPtr& e) {
    std::vector<SymRef> out;
    collect_sym_refs(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Binding extraction: walk the original and a rewritten form in parallel;
// wherever the original has a reference and the rewritten form a constant,
// the sender must have substituted that value.  Subtrees whose shapes no
// longer match (a folded ite) contribute nothing.

inline void extract_bindings(const SymPtr& orig, const SymPtr& rewritten, Bindings& out) {
    if (const auto* r = std::get_if<SymRef>(&orig->node)) {
        if (const auto* c = std::get_if<SymConst>(&rewritten->node))
            out[SymKey{r->is_output, r->stream, r->pos}] = c->value;
        return;
    }
    if (orig->node.index() != rewritten->node.index()) return;
    if (const auto* u = std::get_if<SymUnary>(&orig->node)) {
        const auto* u2 = std::get_if<SymUnary>(&rewritten->node);
        if (u->op == u2->op) extract_bindings(u->operand, u2->operand, out);
        return;
    }
    if (const auto* b = std::get_if<SymBinary>(&orig->node)) {
        const auto* b2 = std::get_if<SymBinary>(&rewritten->node);
        if (b->op == b2->op) {
            extract_bindings(b->lhs, b2->lhs, out);
            extract_bindings(b->rhs, b2->rhs, out);
        }
        return;
    }
    if (const auto* f = std::get_if<SymCall>(&orig->node)) {
        const auto* f2 = std::get_if<SymCall>(&rewritten->node);
        if (f->fn == f2->fn && f->args.size() == f2->args.size())
            for (size_t i = 0; i < f->args.size(); ++i)
                extract_bindings(f->args[i], f2->args[i], out);
        return;
    }
    if (const auto* t = std::get_if<SymIte>(&orig->node)) {
        const auto* t2 = std::get_if<SymIte>(&rewritten->node);
        extract_bindings(t->cond, t2->cond, out);
        extract_bindings(t->then_branch, t2->then_branch, out);
        extract_bindings(t->else_branch, t2->else_branch, out);
        return;
    }
}

// ---------------------------------------------------------------------------
// Local state entries.

struct LsKey {
    std::string var;
    int pos = 0;
    auto operator<=>(const LsKey&) const = default;
};

struct LsEntry {
    bool resolved = false;
    ValueSet values;   // when resolved
    SymPtr rewritten;  // when pending
    SymPtr original;   // when pending: the unsubstituted associated equation
};

using LsMap = std::map<LsKey, LsEntry>;

inline Value normalize_for_stream(const Spec& spec, const std::string& var, const Value& v) {
    if (spec.stream_type(var) == Type::Float && v.index() == 0)
        return Value{static_cast<double>(std::get<std::int64_t>(v))};
    return v;
}

inline LsEntry resolved_entry(const Spec& spec, const std::string& var, const Value& v) {
    LsEntry e;
    e.resolved = true;
    e.values.insert(normalize_for_stream(spec, var, v));
    return e;
}

inline Bindings view_bindings(const View& view) {
    Bindings b;
    for (const auto& [key, v] : view.reads) b[SymKey{false, key.first, key.second}] = v;
    return b;
}

// Rewrites one associated equation against a monitor's observations and any
// already-resolved output positions.
inline LsEntry rewrite_equation(const Spec& spec, const DistributedStream& ds,
                                const std::string& var, int j, const Bindings& known) {
    SymPtr orig = make_symbolic(spec, ds, var, j);
    SymPtr rw = simplify(substitute(orig, known));
    if (auto v = as_const(*rw)) return resolved_entry(spec, var, *v);
    LsEntry e;
    e.resolved = false;
    e.rewritten = rw;
    e.original = orig;
    return e;
}

enum class Observation {
    Observed,           // every referenced event is in the view
    PartiallyObserved,  // some are
    Unobserved,         // none are
};

inline const char* to_string(Observation o) {
    switch (o) {
        case Observation::Observed: return "observed";
        case Observation::PartiallyObserved: return "partially-observed";
        case Observation::Unobserved: return "unobserved";
    }
    return "?";
}

// Classification of a key against a view, judged on the input events the
// associated equation references (output references are derived, not read).
inline Observation classify(const Spec& spec, const DistributedStream& ds,
                            const std::string& var, int j, const View& view) {
    int total = 0, seen = 0;
    for (const auto& r : collect_sym_refs(make_symbolic(spec, ds, var, j))) {
        if (r.is_output) continue;
        ++total;
        if (view.has(r.stream, r.pos)) ++seen;
    }
    if (total == 0 || seen == total) return Observation::Observed;
    if (seen == 0) return Observation::Unobserved;
    return Observation::PartiallyObserved;
}

// ---------------------------------------------------------------------------
// Merge.  Resolved entries win over pending ones; multiple resolved entries
// union their sets.  Pending entries from all sources donate bindings
// (extracted against the shared original), then every pending form is
// re-substituted under the pooled bindings, the receiver's own view, and
// the single-valued resolved keys, to a fixpoint.  A key whose entries all
// stay pending keeps the candidate with the fewest unresolved references.

inline LsMap merge_lc(const Spec& spec, const std::vector<const LsMap*>& sources,
                      const View& own_view) {
    struct Work {
        bool resolved = false;
        ValueSet values;
        std::vector<std::pair<SymPtr, SymPtr>> pendings;  // (rewritten, original)
    };
    std::map<LsKey, Work> work;
    Bindings bindings = view_bindings(own_view);

    for (const LsMap* src : sources) {
        for (const auto& [key, entry] : *src) {
            Work& w = work[key];
            if (entry.resolved) {
                w.resolved = true;
                for (const auto& v : entry.values) w.values.insert(v);
            } else {
                w.pendings.push_back({entry.rewritten, entry.original});
                extract_bindings(entry.original, entry.rewritten, bindings);
            }
        }
    }
    // Single-valued resolved keys act as bindings for output references.
    auto note_resolved = [&](const LsKey& key, const Work& w) {
        if (w.resolved && w.values.size() == 1)
            bindings[SymKey{true, key.var, key.pos}] = *w.values.begin();
    };
    for (const auto& [key, w] : work) note_resolved(key, w);

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [key, w] : work) {
            if (w.resolved) continue;
            for (auto& [rw, orig] : w.pendings) {
                SymPtr next = simplify(substitute(rw, bindings));
                if (next != rw) {
                    Bindings fresh;
                    extract_bindings(orig, next, fresh);
                    for (const auto& [k, v] : fresh) {
                        auto [it, inserted] = bindings.emplace(k, v);
                        (void)it;
                        if (inserted) changed = true;
                    }
                    rw = next;
                }
                if (auto v = as_const(*next)) {
                    w.resolved = true;
                    w.values.insert(normalize_for_stream(spec, key.var, *v));
                    note_resolved(key, w);
                    changed = true;
                    break;
                }
            }
        }
    }

    LsMap out;
    for (auto& [key, w] : work) {
        LsEntry e;
        if (w.resolved) {
            e.resolved = true;
            e.values = std::move(w.values);
        } else {
            e.resolved = false;
            size_t best = 0, best_refs = SIZE_MAX;
            for (size_t i = 0; i < w.pendings.size(); ++i) {
                size_t refs = collect_sym_refs(w.pendings[i].first).size();
                if (refs < best_refs) { best_refs = refs; best = i; }
            }
            e.rewritten = w.pendings[best].first;
            e.original = w.pendings[best].second;
        }
        out[key] = std::move(e);
    }
    return out;
}

// End-of-trace discharge: every reference still unresolved takes its
// boundary value (an output reference falls back to its stream's type
// default).  Returns how many references were discharged.
inline int discharge_terminal(const Spec& spec, LsMap& lc) {
    int discharged = 0;
    for (auto& [key, entry] : lc) {
        if (entry.resolved) continue;
        Bindings b;
        for (const auto& r : collect_sym_refs(entry.rewritten))
            b[SymKey{r.is_output, r.stream, r.pos}] =
                r.is_output ? default_value(spec.stream_type(r.stream)) : r.discharge;
        discharged += static_cast<int>(b.size());
        SymPtr done = simplify(substitute(entry.rewritten, b));
        auto v = as_const(*done);
        if (!v) throw EvalError("discharge left a symbolic entry");
        entry = resolved_entry(spec, key.var, *v);
    }
    return discharged;
}

// ---------------------------------------------------------------------------
// Printing.

inline void print_sym(std::string& out, const SymExpr& e);

inline void print_sym_child(std::string& out, const SymExpr& e, int min_prec) {
    bool parens = false;
    if (const auto* b = std::get_if<SymBinary>(&e.node)) parens = precedence(b->op) < min_prec;
    if (parens) out += "(";
    print_sym(out, e);
    if (parens) out += ")";
}

inline void print_sym(std::string& out, const SymExpr& e) {
    if (const auto* c = std::get_if<SymConst>(&e.node)) {
        out += to_string(c->value);
    } else if (const auto* r = std::get_if<SymRef>(&e.node)) {
        out += r->stream + "(" + std::to_string(r->pos) + ")";
    } else if (const auto* u = std::get_if<SymUnary>(&e.node)) {
        out += u->op == UnOp::Neg ? "-" : "!";
        bool parens = std::holds_alternative<SymBinary>(u->operand->node);
        if (parens) out += "(";
        print_sym(out, *u->operand);
        if (parens) out += ")";
    } else if (const auto* b = std::get_if<SymBinary>(&e.node)) {
        int prec = precedence(b->op);
        print_sym_child(out, *b->lhs, prec);
        out += " ";
        out += to_string(b->op);
        out += " ";
        print_sym_child(out, *b->rhs, prec + 1);
    } else if (const auto* f = std::get_if<SymCall>(&e.node)) {
        out += to_string(f->fn);
        out += "(";
        for (size_t i = 0; i < f->args.size(); ++i) {
            if (i) out += ", ";
            print_sym(out, *f->args[i]);
        }
        out += ")";
    } else if (const auto* t = std::get_if<SymIte>(&e.node)) {
        out += "ite(";
        print_sym(out, *t->cond);
        out += ", ";
        print_sym(out, *t->then_branch);
        out += ", ";
        print_sym(out, *t->else_branch);
        out += ")";
    }
}

inline std::string to_string(const SymExpr& e) {
    std::string out;
    print_sym(out, e);
    return out;
}

inline std::string to_string(const LsKey& key) {
    return key.var + "(" + std::to_string(key.pos) + ")";
}

inline std::string to_string(const LsEntry& e) {
    if (e.resolved) {
        if (e.values.size() == 1) return to_string(*e.values.begin());
        return to_string(e.values);
    }
    return to_string(*e.rewritten);
}

inline std::string to_string(const LsMap& m) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, entry] : m) {
        if (!first) out += ", ";
        out += to_string(key) + " = " + to_string(entry);
        first = false;
    }
    out += "}";
    return out;
}

// ---------------------------------------------------------------------------
// Wire codec.  Canonical structured text; its byte length is the message
// size metric.  Grammar per line:
//   LS <monitor> <round>
//   R <var> <pos> <k> <value>*k
//   P <var> <pos> <rewritten sexp> | <original sexp>
// Values are tagged (i3, f3.5, btrue) so decoding needs no type context.

inline std::string encode_value(const Value& v) {
    switch (v.index()) {
        case 0: return "i" + to_string(v);
        case 1: return "f" + to_string(v);
        default: return "b" + to_string(v);
    }
}

inline Value decode_value(const std::string& s) {
    if (s.empty()) throw TraceError("empty value token");
    std::string body = s.substr(1);
    switch (s[0]) {
        case 'i': return Value{std::stoll(body)};
        case 'f': {
            if (body == "nan") return Value{std::nan("")};
            if (body == "inf") return Value{std::numeric_limits<double>::infinity()};
            if (body == "-inf") return Value{-std::numeric_limits<double>::infinity()};
            return Value{std::stod(body)};
        }
        case 'b': return Value{body == "true"};
        default: throw TraceError("bad value token '" + s + "'");
    }
}

inline void encode_sym(std::string& out, const SymExpr& e) {
    if (const auto* c = std::get_if<SymConst>(&e.node)) {
        out += encode_value(c->value);
    } else if (const auto* r = std::get_if<SymRef>(&e.node)) {
        out += r->is_output ? "(o " : "(r ";
        out += r->stream + " " + std::to_string(r->pos) + " " + encode_value(r->discharge) + ")";
    } else if (const auto* u = std::get_if<SymUnary>(&e.node)) {
        out += u->op == UnOp::Neg ? "(neg " : "(not ";
        encode_sym(out, *u->operand);
        out += ")";
    } else if (const auto* b = std::get_if<SymBinary>(&e.node)) {
        out += "(";
        out += to_string(b->op);
        out += " ";
        encode_sym(out, *b->lhs);
        out += " ";
        encode_sym(out, *b->rhs);
        out += ")";
    } else if (const auto* f = std::get_if<SymCall>(&e.node)) {
        out += "(";
        out += to_string(f->fn);
        for (const auto& a : f->args) {
            out += " ";
            encode_sym(out, *a);
        }
        out += ")";
    } else if (const auto* t = std::get_if<SymIte>(&e.node)) {
        out += "(ite ";
        encode_sym(out, *t->cond);
        out += " ";
        encode_sym(out, *t->then_branch);
        out += " ";
        encode_sym(out, *t->else_branch);
        out += ")";
    }
}

namespace detail {

struct SexpParser {
    std::vector<std::string> toks;
    size_t pos = 0;

    explicit SexpParser(const std::string& text) {
        std::string cur;
        for (char c : text) {
            if (c == '(' || c == ')') {
                if (!cur.empty()) { toks.push_back(cur); cur.clear(); }
                toks.push_back(std::string(1, c));
            } else if (c == ' ' || c == '\t') {
                if (!cur.empty()) { toks.push_back(cur); cur.clear(); }
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) toks.push_back(cur);
    }

    std::string next() {
        if (pos >= toks.size()) throw TraceError("truncated symbolic expression");
        return toks[pos++];
    }

    SymPtr parse() {
        std::string t = next();
        if (t != "(") return sym_const(decode_value(t));
        std::string head = next();
        SymPtr result;
        if (head == "r" || head == "o") {
            std::string stream = next();
            int p = std::stoi(next());
            Value dflt = decode_value(next());
            result = make_sym(SymExpr{SymRef{stream, p, dflt, head == "o"}});
        } else if (head == "neg" || head == "not") {
            result = make_sym(SymExpr{SymUnary{head == "neg" ? UnOp::Neg : UnOp::Not, parse()}});
        } else if (head == "ite") {
            SymPtr c = parse(), a = parse(), b = parse();
            result = make_sym(SymExpr{SymIte{c, a, b}});
        } else if (head == "sqrt" || head == "abs") {
            result = make_sym(
                SymExpr{SymCall{head == "sqrt" ? Builtin::Sqrt : Builtin::Abs, {parse()}}});
        } else if (head == "pow") {
            SymPtr a = parse(), b = parse();
            result = make_sym(SymExpr{SymCall{Builtin::Pow, {a, b}}});
        } else {
            static const std::map<std::string, BinOp> kOps = {
                {"+", BinOp::Add}, {"-", BinOp::Sub}, {"*", BinOp::Mul}, {"/", BinOp::Div},
                {"%", BinOp::Mod}, {"<", BinOp::Lt}, {"<=", BinOp::Le}, {">", BinOp::Gt},
                {">=", BinOp::Ge}, {"==", BinOp::Eq}, {"!=", BinOp::Ne}, {"&&", BinOp::And},
                {"||", BinOp::Or}};
            auto it = kOps.find(head);
            if (it == kOps.end()) throw TraceError("bad operator '" + head + "'");
            SymPtr a = parse(), b = parse();
            result = make_sym(SymExpr{SymBinary{it->second, a, b}});
        }
        if (next() != ")") throw TraceError("expected ')'");
        return result;
    }
};

}  // namespace detail

struct LsMessage {
    int monitor = 0;
    int round = 0;
    LsMap entries;
};

inline std::string encode_ls(const LsMessage& msg) {
    std::string out =
        "LS " + std::to_string(msg.monitor) + " " + std::to_string(msg.round) + "\n";
    for (const auto& [key, e] : msg.entries) {
        if (e.resolved) {
            out += "R " + key.var + " " + std::to_string(key.pos) + " " +
                   std::to_string(e.values.size());
            for (const auto& v : e.values) out += " " + encode_value(v);
            out += "\n";
        } else {
            out += "P " + key.var + " " + std::to_string(key.pos) + " ";
            encode_sym(out, *e.rewritten);
            out += " | ";
            encode_sym(out, *e.original);
            out += "\n";
        }
    }
    return out;
}

inline LsMessage decode_ls(const std::string& text) {
    LsMessage msg;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "LS") {
            ls >> msg.monitor >> msg.round;
            header = true;
        } else if (tag == "R") {
            LsKey key;
            size_t k = 0;
            ls >> key.var >> key.pos >> k;
            LsEntry e;
            e.resolved = true;
            for (size_t i = 0; i < k; ++i) {
                std::string tok;
                ls >> tok;
                e.values.insert(decode_value(tok));
            }
            msg.entries[key] = std::move(e);
        } else if (tag == "P") {
            LsKey key;
            ls >> key.var >> key.pos;
            std::string rest;
            std::getline(ls, rest);
            size_t bar = rest.find(" | ");
            if (bar == std::string::npos) throw TraceError("malformed pending entry");
            LsEntry e;
            e.resolved = false;
            e.rewritten = detail::SexpParser(rest.substr(0, bar)).parse();
            e.original = detail::SexpParser(rest.substr(bar + 3)).parse();
            msg.entries[key] = std::move(e);
        } else {
            throw TraceError("bad message line tag '" + tag + "'");
        }
    }
    if (!header) throw TraceError("message missing LS header");
    return msg;
}

}  // namespace pslola
