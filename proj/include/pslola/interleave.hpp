#pragma once

// Interleaving semantics under bounded clock skew.
//
// A time assignment maps every event to one global instant inside its
// candidate window, strictly increasing along each stream and respecting
// happened-before across streams.  Each assignment induces one dense trace
// (pulse/hold reconstruction), each induced trace has one synchronous
// evaluation, and the possible-worlds verdict of a stream position is the
// set of values it takes across all assignments.
//
// Two backends produce assignments behind one interface: an exhaustive
// recursive enumerator (the oracle), and a constraint-search backend that
// runs a most-constrained-first DFS with forward checking and supports the
// standard blocking protocol (repeatedly ask for an assignment whose full
// evaluation differs from everything seen; stop on UNSAT).

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pslola/stream.hpp"

namespace pslola {

// delta[g] = assigned global instant of the g-th event in EventList order.
struct TimeAssignment {
    std::vector<int> delta;
};

namespace detail {

struct InterleaveProblem {
    const Spec* spec;
    DistributedStream ds;
    int eps;
    EventList events;
    std::vector<std::pair<int, int>> window;       // candidate_times per event
    std::vector<int> same_stream_prev;             // global id or -1
    std::vector<std::vector<int>> hb_preds;        // direct predecessors (earlier ids)

    InterleaveProblem(const Spec& s, DistributedStream d, int e)
        : spec(&s), ds(std::move(d)), eps(e), events(ds) {
        int m = static_cast<int>(events.items.size());
        window.reserve(m);
        same_stream_prev.assign(m, -1);
        hb_preds.assign(m, {});
        for (int g = 0; g < m; ++g)
            window.push_back(candidate_times(events.items[g].sigma, eps, ds.n));
        // Same-stream chains tighten every window: an event must leave room
        // below for its predecessors and above for its successors.  Both
        // bounds are implied by validity (placements are strictly increasing
        // along a stream), so the assignment set is unchanged; without them
        // a dense chain backtracks exponentially before proving that only
        // the identity placement fits.
        for (const auto& ids : events.by_stream) {
            for (size_t i = 1; i < ids.size(); ++i) {
                auto& w = window[static_cast<size_t>(ids[i])];
                w.first = std::max(w.first, window[static_cast<size_t>(ids[i - 1])].first + 1);
            }
            for (size_t i = ids.size(); i-- > 1;) {
                auto& w = window[static_cast<size_t>(ids[i - 1])];
                w.second = std::min(w.second, window[static_cast<size_t>(ids[i])].second - 1);
            }
        }
        for (const auto& ids : events.by_stream)
            for (size_t i = 1; i < ids.size(); ++i) same_stream_prev[ids[i]] = ids[i - 1];
        // Direct relation only: delta respects it, hence its transitive
        // closure, because < is transitive.
        for (int f = 0; f < m; ++f)
            for (int g = f + 1; g < m; ++g)
                if (events.items[f].stream_id != events.items[g].stream_id &&
                    happened_before(events.items[f], events.items[g], eps))
                    hb_preds[g].push_back(f);
    }
};

}  // namespace detail

// All valid time assignments, in lexicographic order of the global event
// list.  Events are visited in (sigma, stream) order, so every ordering
// constraint points backward and enumeration is a simple backtracking scan.
inline std::vector<TimeAssignment> enumerate_assignments(const Spec& spec,
                                                         const DistributedStream& ds,
                                                         int eps) {
    detail::InterleaveProblem p(spec, ds, eps);
    int m = static_cast<int>(p.events.items.size());
    std::vector<TimeAssignment> out;
    std::vector<int> delta(static_cast<size_t>(m), 0);
    int g = 0;
    auto min_time = [&](int id) {
        int lo = p.window[static_cast<size_t>(id)].first;
        if (int prev = p.same_stream_prev[static_cast<size_t>(id)]; prev >= 0)
            lo = std::max(lo, delta[static_cast<size_t>(prev)] + 1);
        for (int f : p.hb_preds[static_cast<size_t>(id)])
            lo = std::max(lo, delta[static_cast<size_t>(f)] + 1);
        return lo;
    };
    if (m == 0) {
        out.push_back(TimeAssignment{});
        return out;
    }
    std::vector<int> cursor(static_cast<size_t>(m), 0);
    cursor[0] = min_time(0);
    while (g >= 0) {
        if (g == m) {
            out.push_back(TimeAssignment{delta});
            --g;
            if (g >= 0) ++cursor[static_cast<size_t>(g)];
            continue;
        }
        int t = cursor[static_cast<size_t>(g)];
        if (t > p.window[static_cast<size_t>(g)].second) {
            --g;
            if (g >= 0) ++cursor[static_cast<size_t>(g)];
            continue;
        }
        delta[static_cast<size_t>(g)] = t;
        ++g;
        if (g < m) cursor[static_cast<size_t>(g)] = min_time(g);
    }
    return out;
}

inline bool is_valid_assignment(const Spec& spec, const DistributedStream& ds, int eps,
                                const TimeAssignment& ta) {
    detail::InterleaveProblem p(spec, ds, eps);
    int m = static_cast<int>(p.events.items.size());
    if (static_cast<int>(ta.delta.size()) != m) return false;
    for (int g = 0; g < m; ++g) {
        int t = ta.delta[static_cast<size_t>(g)];
        if (t < p.window[static_cast<size_t>(g)].first ||
            t > p.window[static_cast<size_t>(g)].second)
            return false;
        if (int prev = p.same_stream_prev[static_cast<size_t>(g)]; prev >= 0)
            if (ta.delta[static_cast<size_t>(prev)] >= t) return false;
        for (int f : p.hb_preds[static_cast<size_t>(g)])
            if (ta.delta[static_cast<size_t>(f)] >= t) return false;
    }
    return true;
}

// Dense trace induced by placing every event at its assigned instant.
inline SyncTrace induced_trace(const Spec& spec, const DistributedStream& ds,
                               const TimeAssignment& ta) {
    EventList ev(ds);
    DistributedStream placed;
    placed.n = ds.n;
    for (size_t sid = 0; sid < ev.stream_names.size(); ++sid) {
        auto& evs = placed.events[ev.stream_names[sid]];
        for (int g : ev.by_stream[sid])
            evs.push_back({ta.delta[static_cast<size_t>(g)], ev.items[static_cast<size_t>(g)].value});
    }
    return densify(placed, spec);
}

// The per-stream sequence of frontier timestamps an assignment induces over
// the horizon.  Distinct assignments always induce distinct sequences (each
// event is its stream's frontier at its own instant); tests assert this.
inline std::string frontier_sequence(const DistributedStream& ds, const TimeAssignment& ta) {
    EventList ev(ds);
    std::string out;
    for (size_t sid = 0; sid < ev.stream_names.size(); ++sid) {
        out += ev.stream_names[sid];
        out += ":";
        for (int j = 0; j <= ds.n; ++j) {
            int last = -1;
            for (size_t i = 0; i < ev.by_stream[sid].size(); ++i) {
                int g = ev.by_stream[sid][i];
                if (ta.delta[static_cast<size_t>(g)] <= j) last = static_cast<int>(i);
            }
            out += std::to_string(last) + ",";
        }
        out += ";";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Possible-worlds evaluation.

struct PsResult {
    std::map<std::string, std::vector<ValueSet>> sets;  // output -> per-position value sets
    int assignments = 0;  // valid assignments considered
};

struct Evaluation {
    TimeAssignment assignment;
    std::map<std::string, std::vector<Value>> outputs;
    std::string fingerprint;
};

inline std::string evaluation_fingerprint(const std::map<std::string, std::vector<Value>>& outs) {
    std::string fp;
    for (const auto& [name, vals] : outs) {
        fp += name;
        fp += "=";
        for (const auto& v : vals) { fp += to_string(v); fp += ","; }
        fp += ";";
    }
    return fp;
}

inline Evaluation evaluate_assignment(const Spec& spec, const DistributedStream& ds,
                                      const TimeAssignment& ta) {
    Evaluation ev;
    ev.assignment = ta;
    ev.outputs = evaluate_sync(spec, induced_trace(spec, ds, ta));
    ev.fingerprint = evaluation_fingerprint(ev.outputs);
    return ev;
}

// Exhaustive union over all assignments: the reference semantics.
inline PsResult evaluate_ps_reference(const Spec& spec, const DistributedStream& ds, int eps) {
    PsResult res;
    for (const auto& o : spec.outputs)
        res.sets[o.name].assign(static_cast<size_t>(ds.n) + 1, {});
    for (const auto& ta : enumerate_assignments(spec, ds, eps)) {
        ++res.assignments;
        auto outs = evaluate_sync(spec, induced_trace(spec, ds, ta));
        for (auto& [name, vals] : outs)
            for (int j = 0; j <= ds.n; ++j)
                res.sets[name][static_cast<size_t>(j)].insert(vals[static_cast<size_t>(j)]);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Backends.

class EvalBackend {
  public:
    virtual ~EvalBackend() = default;
    virtual const char* name() const = 0;
    virtual void reset(const Spec& spec, const DistributedStream& ds, int eps) = 0;
    // One assignment whose full evaluation is not yet blocked, or nothing
    // when every distinct evaluation has been blocked (UNSAT).
    virtual std::optional<Evaluation> solve_one(const std::set<std::string>& blocked) = 0;
};

class ExhaustiveBackend final : public EvalBackend {
  public:
    const char* name() const override { return "exhaustive"; }

    void reset(const Spec& spec, const DistributedStream& ds, int eps) override {
        spec_ = &spec;
        ds_ = ds;
        all_ = enumerate_assignments(spec, ds_, eps);
    }

    std::optional<Evaluation> solve_one(const std::set<std::string>& blocked) override {
        // Later queries may need evaluations skipped by earlier ones, so
        // always scan from the front.
        for (const auto& ta : all_) {
            Evaluation ev = evaluate_assignment(*spec_, ds_, ta);
            if (!blocked.count(ev.fingerprint)) return ev;
        }
        return std::nullopt;
    }

  private:
    const Spec* spec_ = nullptr;
    DistributedStream ds_;
    std::vector<TimeAssignment> all_;
};

// Most-constrained-first DFS with forward checking.  Events are ordered by
// ascending window width; every candidate instant is checked against all
// already-placed events in both directions, and each placement prunes the
// remaining feasible range of every unplaced event.
class SearchBackend final : public EvalBackend {
  public:
    const char* name() const override { return "search"; }

    void reset(const Spec& spec, const DistributedStream& ds, int eps) override {
        spec_ = &spec;
        problem_ = std::make_unique<detail::InterleaveProblem>(spec, ds, eps);
        int m = static_cast<int>(problem_->events.items.size());
        order_.clear();
        for (int g = 0; g < m; ++g) order_.push_back(g);
        std::sort(order_.begin(), order_.end(), [&](int a, int b) {
            int wa = problem_->window[static_cast<size_t>(a)].second -
                     problem_->window[static_cast<size_t>(a)].first;
            int wb = problem_->window[static_cast<size_t>(b)].second -
                     problem_->window[static_cast<size_t>(b)].first;
            if (wa != wb) return wa < wb;
            return a < b;
        });
        hb_succs_.assign(static_cast<size_t>(m), {});
        for (int g = 0; g < m; ++g)
            for (int f : problem_->hb_preds[static_cast<size_t>(g)])
                hb_succs_[static_cast<size_t>(f)].push_back(g);
        same_stream_next_.assign(static_cast<size_t>(m), -1);
        for (const auto& ids : problem_->events.by_stream)
            for (size_t i = 0; i + 1 < ids.size(); ++i) same_stream_next_[ids[i]] = ids[i + 1];
        delta_.assign(static_cast<size_t>(m), -1);
        // DFS stack of (depth, candidate instant to try next).
        stack_.clear();
        stack_.push_back({0, -1});
        emitted_empty_ = false;
    }

    std::optional<Evaluation> solve_one(const std::set<std::string>& blocked) override {
        int m = static_cast<int>(problem_->events.items.size());
        if (m == 0) {
            if (emitted_empty_) return std::nullopt;
            Evaluation ev = evaluate_assignment(*spec_, problem_->ds, TimeAssignment{});
            if (blocked.count(ev.fingerprint)) return std::nullopt;
            emitted_empty_ = true;
            return ev;
        }
        // Resume the DFS where the previous call left off.  A solution found
        // with a blocked fingerprint is skipped, not returned twice.
        while (!stack_.empty()) {
            Frame f = stack_.back();
            stack_.pop_back();
            if (f.depth == m) {
                TimeAssignment ta{delta_};
                Evaluation ev = evaluate_assignment(*spec_, problem_->ds, ta);
                if (!blocked.count(ev.fingerprint)) return ev;
                continue;
            }
            int g = order_[static_cast<size_t>(f.depth)];
            const auto [wlo, whi] = problem_->window[static_cast<size_t>(g)];
            int t = f.next_candidate < wlo ? wlo : f.next_candidate;
            // Find the next consistent instant for g.
            for (; t <= whi; ++t) {
                if (consistent(g, t)) break;
            }
            if (t > whi) {
                delta_[static_cast<size_t>(g)] = -1;
                continue;  // backtrack: parent frame already queued its next try
            }
            // Queue the sibling (next candidate) before descending.
            stack_.push_back({f.depth, t + 1});
            delta_[static_cast<size_t>(g)] = t;
            if (forward_feasible(f.depth)) {
                stack_.push_back({f.depth + 1, -1});
            } else {
                delta_[static_cast<size_t>(g)] = -1;
            }
        }
        return std::nullopt;
    }

  private:
    struct Frame {
        int depth;
        int next_candidate;
    };

    bool consistent(int g, int t) const {
        if (int prev = problem_->same_stream_prev[static_cast<size_t>(g)]; prev >= 0)
            if (delta_[static_cast<size_t>(prev)] >= 0 && delta_[static_cast<size_t>(prev)] >= t)
                return false;
        if (int next = same_stream_next_[static_cast<size_t>(g)]; next >= 0)
            if (delta_[static_cast<size_t>(next)] >= 0 && delta_[static_cast<size_t>(next)] <= t)
                return false;
        for (int f : problem_->hb_preds[static_cast<size_t>(g)])
            if (delta_[static_cast<size_t>(f)] >= 0 && delta_[static_cast<size_t>(f)] >= t)
                return false;
        for (int s : hb_succs_[static_cast<size_t>(g)])
            if (delta_[static_cast<size_t>(s)] >= 0 && delta_[static_cast<size_t>(s)] <= t)
                return false;
        return true;
    }

    // After placing the first `depth+1` events of order_, every unplaced
    // event must still have some instant consistent with all placed ones.
    bool forward_feasible(int depth) const {
        int m = static_cast<int>(problem_->events.items.size());
        for (int d = depth + 1; d < m; ++d) {
            int g = order_[static_cast<size_t>(d)];
            const auto [wlo, whi] = problem_->window[static_cast<size_t>(g)];
            bool any = false;
            for (int t = wlo; t <= whi; ++t)
                if (consistent(g, t)) { any = true; break; }
            if (!any) return false;
        }
        return true;
    }

    const Spec* spec_ = nullptr;
    std::unique_ptr<detail::InterleaveProblem> problem_;
    std::vector<int> order_;
    std::vector<int> delta_;
    std::vector<int> same_stream_next_;
    std::vector<std::vector<int>> hb_succs_;
    std::vector<Frame> stack_;
    bool emitted_empty_ = false;
};

inline std::unique_ptr<EvalBackend> make_backend(const std::string& name) {
    if (name == "exhaustive" || name.empty()) return std::make_unique<ExhaustiveBackend>();
    // "smt" selects the constraint-search backend: it drives the same
    // blocking protocol an external solver would, with no extra dependency.
    if (name == "smt" || name == "search") return std::make_unique<SearchBackend>();
    throw std::runtime_error("unknown backend '" + name + "' (use exhaustive or smt)");
}

// Blocking loop: enumerate distinct evaluations until UNSAT.
inline std::vector<Evaluation> unique_evaluations(EvalBackend& backend, const Spec& spec,
                                                  const DistributedStream& ds, int eps) {
    backend.reset(spec, ds, eps);
    std::vector<Evaluation> out;
    std::set<std::string> blocked;
    while (auto ev = backend.solve_one(blocked)) {
        blocked.insert(ev->fingerprint);
        out.push_back(std::move(*ev));
    }
    return out;
}

// Possible-worlds sets computed through a backend's blocking loop; for the
// exhaustive backend this equals evaluate_ps_reference.
inline PsResult evaluate_ps_backend(EvalBackend& backend, const Spec& spec,
                                    const DistributedStream& ds, int eps) {
    PsResult res;
    for (const auto& o : spec.outputs)
        res.sets[o.name].assign(static_cast<size_t>(ds.n) + 1, {});
    for (const auto& ev : unique_evaluations(backend, spec, ds, eps)) {
        ++res.assignments;
        for (const auto& [name, vals] : ev.outputs)
            for (int j = 0; j <= ds.n; ++j)
                res.sets[name][static_cast<size_t>(j)].insert(vals[static_cast<size_t>(j)]);
    }
    return res;
}

}  // namespace pslola
