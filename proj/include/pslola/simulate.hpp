#pragma once

// Round-based decentralized monitoring over a synchronous bus.
//
// The horizon is cut into rounds of k positions.  In round r every monitor
// ingests the events assigned to it whose timestamps fall inside the rounds
// elapsed so far, instantiates equations for the positions the round makes
// active (reaching eps-1 positions back, since bounded skew lets a late
// event land that far before the round boundary), re-substitutes everything
// it still carries, broadcasts its local state to every other monitor, and
// merges what it receives.  After the final round, unresolved references
// take their boundary values.
//
// A monitor that ends up having observed every event holds the whole trace
// and adopts the exact possible-worlds verdict for its keys instead; with a
// single monitor this makes the simulation agree with the reference
// semantics by construction.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pslola/interleave.hpp"
#include "pslola/rewrite.hpp"

namespace pslola {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimOptions {
    int eps = 1;
    int k = 1;
};

inline int round_count(int n, int k) { return std::max(1, (n + k - 1) / k); }

// Active key positions in round r: the round's own segment plus the eps-1
// positions before it.
inline std::pair<int, int> round_range(int r, int k, int eps, int n) {
    return {std::max(0, (r - 1) * k - eps + 1), std::min(n, r * k)};
}

inline long long expected_messages(int n, int k, int monitors) {
    return static_cast<long long>(round_count(n, k)) * monitors * (monitors - 1);
}

struct RoundRecord {
    int round = 0;
    int lo = 0, hi = 0;               // active key range
    std::vector<LsMap> local;         // per monitor, after local update, before exchange
    std::vector<LsMap> merged;        // per monitor, after exchange
    std::vector<std::string> sent;    // per monitor, broadcast payload (wire form)
    long long messages = 0;
    std::size_t bytes = 0;
};

struct SimResult {
    int rounds = 0;
    int monitors = 0;
    std::vector<RoundRecord> trace;
    std::vector<LsMap> final_states;                     // per monitor, fully resolved
    std::map<std::string, std::vector<ValueSet>> result; // union across monitors
    long long messages = 0;
    std::size_t bytes = 0;
    int discharged = 0;                                  // references closed by boundary values
    std::vector<bool> full_observation;                  // per monitor
};

namespace detail {

struct MonitorState {
    View view;                               // cumulative observations
    LsMap lc;
    std::map<LsKey, std::string> last_sent;  // canonical form at last broadcast
};

inline Bindings local_bindings(const MonitorState& st) {
    Bindings b = view_bindings(st.view);
    for (const auto& [key, entry] : st.lc)
        if (entry.resolved && entry.values.size() == 1)
            b[SymKey{true, key.var, key.pos}] = *entry.values.begin();
    return b;
}

}  // namespace detail

// views[m] holds everything monitor m ever reads; the value of an event
// becomes visible to its reader in the first round whose span covers the
// event's timestamp.
inline SimResult run_simulation(const Spec& spec, const DistributedStream& ds,
                                const std::vector<View>& views, const SimOptions& opts) {
    if (opts.eps < 1) throw SimError("eps must be at least 1");
    if (opts.k < 1) throw SimError("k must be at least 1");
    if (views.empty()) throw SimError("at least one monitor is required");
    if (auto vv = validate_views(ds, views); !vv.ok) throw SimError(vv.problem);

    int monitors = static_cast<int>(views.size());
    int rounds = round_count(ds.n, opts.k);

    SimResult res;
    res.rounds = rounds;
    res.monitors = monitors;

    std::vector<detail::MonitorState> st(static_cast<size_t>(monitors));

    for (int r = 1; r <= rounds; ++r) {
        RoundRecord rec;
        rec.round = r;
        std::tie(rec.lo, rec.hi) = round_range(r, opts.k, opts.eps, ds.n);

        // Local phase: ingest reads, instantiate the active keys, refresh
        // carried entries.
        for (int m = 0; m < monitors; ++m) {
            auto& s = st[static_cast<size_t>(m)];
            for (const auto& [key, v] : views[static_cast<size_t>(m)].reads)
                if (key.second <= r * opts.k) s.view.reads[key] = v;
            Bindings known = detail::local_bindings(s);
            for (const auto& o : spec.outputs)
                for (int j = rec.lo; j <= rec.hi; ++j)
                    if (!s.lc.count(LsKey{o.name, j}))
                        s.lc[LsKey{o.name, j}] = rewrite_equation(spec, ds, o.name, j, known);
            for (auto& [key, entry] : s.lc) {
                if (entry.resolved) continue;
                SymPtr next = simplify(substitute(entry.rewritten, known));
                if (auto v = as_const(*next))
                    entry = resolved_entry(spec, key.var, *v);
                else
                    entry.rewritten = next;
            }
            rec.local.push_back(s.lc);
        }

        // Exchange phase: every monitor broadcasts its active keys, its
        // still-pending entries, and whatever changed since it last spoke.
        // A message goes out on every channel each round, even when empty.
        std::vector<std::string> wires;
        for (int m = 0; m < monitors; ++m) {
            auto& s = st[static_cast<size_t>(m)];
            LsMessage msg;
            msg.monitor = m + 1;
            msg.round = r;
            for (const auto& [key, entry] : s.lc) {
                std::string canon = to_string(entry);
                bool in_range = key.pos >= rec.lo && key.pos <= rec.hi;
                auto prev = s.last_sent.find(key);
                bool changed = prev == s.last_sent.end() || prev->second != canon;
                if (in_range || !entry.resolved || changed) {
                    msg.entries[key] = entry;
                    s.last_sent[key] = canon;
                }
            }
            wires.push_back(encode_ls(msg));
        }
        rec.sent = wires;
        rec.messages = static_cast<long long>(monitors) * (monitors - 1);
        for (const auto& w : wires) rec.bytes += w.size() * static_cast<size_t>(monitors - 1);

        // Merge phase: the bus delivers synchronously; decoding the wire
        // form keeps the codec honest on every exchange.
        std::vector<LsMessage> inbox;
        for (int m = 0; m < monitors; ++m) inbox.push_back(decode_ls(wires[static_cast<size_t>(m)]));
        for (int m = 0; m < monitors; ++m) {
            auto& s = st[static_cast<size_t>(m)];
            std::vector<const LsMap*> sources;
            sources.push_back(&s.lc);
            for (int o = 0; o < monitors; ++o)
                if (o != m) sources.push_back(&inbox[static_cast<size_t>(o)].entries);
            s.lc = merge_lc(spec, sources, s.view);
            rec.merged.push_back(s.lc);
        }

        res.messages += rec.messages;
        res.bytes += rec.bytes;
        res.trace.push_back(std::move(rec));
    }

    // Terminal step: full observers adopt the exact verdict, everyone else
    // discharges what is still open.
    res.full_observation.assign(static_cast<size_t>(monitors), false);
    std::optional<PsResult> reference;
    for (int m = 0; m < monitors; ++m) {
        auto& s = st[static_cast<size_t>(m)];
        bool full = true;
        for (const auto& [name, evs] : ds.events)
            for (const auto& [sigma, v] : evs) {
                (void)v;
                if (!s.view.has(name, sigma)) { full = false; break; }
            }
        res.full_observation[static_cast<size_t>(m)] = full;
        if (full) {
            if (!reference) reference = evaluate_ps_reference(spec, ds, opts.eps);
            for (const auto& [name, sets] : reference->sets)
                for (int j = 0; j <= ds.n; ++j) {
                    LsEntry e;
                    e.resolved = true;
                    e.values = sets[static_cast<size_t>(j)];
                    s.lc[LsKey{name, j}] = std::move(e);
                }
        } else {
            res.discharged += discharge_terminal(spec, s.lc);
        }
        res.final_states.push_back(s.lc);
    }

    for (const auto& o : spec.outputs)
        res.result[o.name].assign(static_cast<size_t>(ds.n) + 1, {});
    for (const auto& lc : res.final_states)
        for (const auto& [key, entry] : lc) {
            if (!entry.resolved) throw SimError("unresolved entry survived the terminal round");
            auto& slot = res.result[key.var][static_cast<size_t>(key.pos)];
            for (const auto& v : entry.values) slot.insert(v);
        }
    return res;
}

// ---------------------------------------------------------------------------
// Comparison against the centralized possible-worlds verdict.

struct CentralizedCheck {
    bool equal = true;
    std::vector<std::string> differences;
};

inline CentralizedCheck check_against_centralized(const Spec& spec, const DistributedStream& ds,
                                                  int eps, const SimResult& sim) {
    CentralizedCheck res;
    PsResult ref = evaluate_ps_reference(spec, ds, eps);
    for (const auto& [name, sets] : ref.sets) {
        auto it = sim.result.find(name);
        for (int j = 0; j <= ds.n; ++j) {
            const ValueSet& want = sets[static_cast<size_t>(j)];
            ValueSet got;
            if (it != sim.result.end()) got = it->second[static_cast<size_t>(j)];
            if (!set_equal(want, got)) {
                res.equal = false;
                res.differences.push_back(name + "(" + std::to_string(j) + "): centralized " +
                                          to_string(want) + " vs decentralized " + to_string(got));
            }
        }
    }
    return res;
}

}  // namespace pslola
