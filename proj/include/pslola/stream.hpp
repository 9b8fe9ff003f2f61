#pragma once

// Distributed traces: each stream carries sparse timestamped events on a
// shared horizon 0..n, but clocks are only synchronized to within a known
// skew bound eps.  Two events on one stream are ordered by timestamp; across
// streams, e happened before f only when sigma_e + eps < sigma_f.  An event
// with timestamp sigma may actually have occurred at any global instant in
// [sigma - eps + 1, sigma + eps - 1], clamped to the horizon.
//
// Densification turns a sparse trace into the per-position trace it induces
// when every timestamp is taken at face value: bool streams are pulses (the
// value holds exactly at its instant, false elsewhere); numeric streams hold
// their last value, with positions before the first event inheriting it.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pslola/sync.hpp"

namespace pslola {

struct Event {
    std::string stream;
    int sigma = 0;
    Value value;
};

struct DistributedStream {
    int n = -1;
    // Per stream, (sigma, value) sorted by strictly increasing sigma.
    std::map<std::string, std::vector<std::pair<int, Value>>> events;

    int total_events() const {
        int k = 0;
        for (const auto& [_, ev] : events) k += static_cast<int>(ev.size());
        return k;
    }
};

struct TraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flattened, globally indexed event list used by the ordering and
// interleaving machinery.  Global order: by (sigma, stream, position).
struct EventList {
    struct Item {
        int stream_id;
        int index_in_stream;
        int sigma;
        Value value;
    };
    std::vector<std::string> stream_names;
    std::vector<Item> items;
    std::vector<std::vector<int>> by_stream;  // stream_id -> global ids in sigma order

    explicit EventList(const DistributedStream& ds) {
        for (const auto& [name, evs] : ds.events) {
            int sid = static_cast<int>(stream_names.size());
            stream_names.push_back(name);
            for (int i = 0; i < static_cast<int>(evs.size()); ++i)
                items.push_back(Item{sid, i, evs[i].first, evs[i].second});
        }
        std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
            return std::tie(a.sigma, a.stream_id, a.index_in_stream) <
                   std::tie(b.sigma, b.stream_id, b.index_in_stream);
        });
        by_stream.resize(stream_names.size());
        for (int g = 0; g < static_cast<int>(items.size()); ++g)
            by_stream[items[g].stream_id].push_back(g);
    }
};

// Direct happened-before relation between two events.
inline bool happened_before(const EventList::Item& e, const EventList::Item& f, int eps) {
    if (e.stream_id == f.stream_id) return e.index_in_stream < f.index_in_stream;
    return e.sigma + eps < f.sigma;
}

// Transitive closure of happened-before over the whole event list, one
// bitset row (packed into 64-bit blocks) per event.
struct HbRelation {
    int size = 0;
    int blocks = 0;
    std::vector<std::uint64_t> bits;

    bool at(int i, int j) const {
        return (bits[static_cast<size_t>(i) * blocks + (j >> 6)] >> (j & 63)) & 1;
    }
    void set(int i, int j) {
        bits[static_cast<size_t>(i) * blocks + (j >> 6)] |= std::uint64_t{1} << (j & 63);
    }
};

inline HbRelation hb_closure(const EventList& ev, int eps) {
    HbRelation r;
    r.size = static_cast<int>(ev.items.size());
    r.blocks = (r.size + 63) / 64;
    r.bits.assign(static_cast<size_t>(r.size) * r.blocks, 0);
    for (int i = 0; i < r.size; ++i)
        for (int j = 0; j < r.size; ++j)
            if (i != j && happened_before(ev.items[i], ev.items[j], eps)) r.set(i, j);
    // Floyd-Warshall on bit rows: if i reaches k, i also reaches k's row.
    for (int k = 0; k < r.size; ++k)
        for (int i = 0; i < r.size; ++i)
            if (r.at(i, k))
                for (int b = 0; b < r.blocks; ++b)
                    r.bits[static_cast<size_t>(i) * r.blocks + b] |=
                        r.bits[static_cast<size_t>(k) * r.blocks + b];
    return r;
}

// Global instants an event with local timestamp sigma may occupy.
inline std::pair<int, int> candidate_times(int sigma, int eps, int n) {
    int lo = sigma - eps + 1;
    int hi = sigma + eps - 1;
    if (lo < 0) lo = 0;
    if (hi > n) hi = n;
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Consistent cuts.  A cut takes a prefix of every stream; it is consistent
// when it is closed under happened-before.

struct Cut {
    std::map<std::string, int> taken;  // stream -> number of leading events included
};

inline bool is_consistent_cut(const DistributedStream& ds, const Cut& cut, int eps) {
    EventList ev(ds);
    auto taken_of = [&](int stream_id) {
        auto it = cut.taken.find(ev.stream_names[static_cast<size_t>(stream_id)]);
        return it == cut.taken.end() ? 0 : it->second;
    };
    auto in_cut = [&](const EventList::Item& item) {
        return item.index_in_stream < taken_of(item.stream_id);
    };
    // Closure under the direct relation implies closure under its transitive
    // closure, so the pairwise check suffices.
    for (const auto& e : ev.items)
        for (const auto& f : ev.items)
            if (in_cut(f) && !in_cut(e) && happened_before(e, f, eps)) return false;
    return true;
}

// Last event of each stream inside the cut.
inline std::map<std::string, Event> frontier(const DistributedStream& ds, const Cut& cut) {
    std::map<std::string, Event> out;
    for (const auto& [name, evs] : ds.events) {
        auto it = cut.taken.find(name);
        int k = it == cut.taken.end() ? 0 : it->second;
        if (k <= 0 || evs.empty()) continue;
        if (k > static_cast<int>(evs.size())) k = static_cast<int>(evs.size());
        out[name] = Event{name, evs[k - 1].first, evs[k - 1].second};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Monitor views: the raw reads one monitor retains.

struct View {
    std::map<std::pair<std::string, int>, Value> reads;  // (stream, sigma) -> value

    bool has(const std::string& stream, int sigma) const {
        return reads.count({stream, sigma}) != 0;
    }
};

struct ViewValidation {
    bool ok = true;
    std::string problem;
};

// Valid when every event is read by at least one monitor, no monitor invents
// an event, and overlapping reads agree on the value.
inline ViewValidation validate_views(const DistributedStream& ds,
                                     const std::vector<View>& views) {
    ViewValidation res;
    std::map<std::pair<std::string, int>, Value> truth;
    for (const auto& [name, evs] : ds.events)
        for (const auto& [sigma, v] : evs) truth[{name, sigma}] = v;

    for (size_t m = 0; m < views.size(); ++m) {
        for (const auto& [key, v] : views[m].reads) {
            auto it = truth.find(key);
            if (it == truth.end()) {
                res.ok = false;
                res.problem = "monitor " + std::to_string(m + 1) + " reads nonexistent event " +
                              key.first + "@" + std::to_string(key.second);
                return res;
            }
            if (!(it->second == v)) {
                res.ok = false;
                res.problem = "monitor " + std::to_string(m + 1) + " disagrees on " + key.first +
                              "@" + std::to_string(key.second) + " (" + to_string(v) + " vs " +
                              to_string(it->second) + ")";
                return res;
            }
        }
    }
    for (const auto& [key, v] : truth) {
        (void)v;
        bool covered = false;
        for (const auto& view : views)
            if (view.reads.count(key)) { covered = true; break; }
        if (!covered) {
            res.ok = false;
            res.problem = "event " + key.first + "@" + std::to_string(key.second) +
                          " is read by no monitor";
            return res;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Densification.

inline std::vector<Value> densify_stream(const std::vector<std::pair<int, Value>>& evs,
                                         Type type, int n) {
    std::vector<Value> out(static_cast<size_t>(n) + 1, default_value(type));
    if (type == Type::Bool) {
        for (const auto& [sigma, v] : evs)
            if (sigma >= 0 && sigma <= n) out[static_cast<size_t>(sigma)] = v;
        return out;
    }
    if (evs.empty()) return out;
    size_t next = 0;
    Value cur = evs.front().second;  // positions before the first event inherit it
    for (int j = 0; j <= n; ++j) {
        while (next < evs.size() && evs[next].first <= j) cur = evs[next++].second;
        out[static_cast<size_t>(j)] = cur;
    }
    return out;
}

inline SyncTrace densify(const DistributedStream& ds, const Spec& spec) {
    SyncTrace t;
    t.n = ds.n;
    for (const auto& in : spec.inputs) {
        auto it = ds.events.find(in.name);
        static const std::vector<std::pair<int, Value>> kEmpty;
        const auto& evs = it == ds.events.end() ? kEmpty : it->second;
        t.values[in.name] = densify_stream(evs, in.type, ds.n);
    }
    return t;
}

inline DistributedStream to_distributed(const SyncTrace& trace) {
    DistributedStream ds;
    ds.n = trace.n;
    for (const auto& [name, vals] : trace.values) {
        auto& evs = ds.events[name];
        for (int j = 0; j <= trace.n; ++j)
            evs.push_back({j, vals[static_cast<size_t>(j)]});
    }
    return ds;
}

// ---------------------------------------------------------------------------
// CSV trace format: header `stream,timestamp,value`, one event per row,
// `#` comments and blank lines allowed, rows in any order.

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline Value parse_csv_value(const std::string& text, Type type, bool is_unsigned,
                             const std::string& stream, int lineno) {
    const std::string where =
        "line " + std::to_string(lineno) + ": stream '" + stream + "': ";
    try {
        switch (type) {
            case Type::Bool:
                if (text == "true") return Value{true};
                if (text == "false") return Value{false};
                throw TraceError(where + "expected true/false, got '" + text + "'");
            case Type::Int: {
                size_t used = 0;
                std::int64_t v = std::stoll(text, &used);
                if (used != text.size())
                    throw TraceError(where + "bad int value '" + text + "'");
                if (is_unsigned && v < 0)
                    throw TraceError(where + "negative value " + text +
                                     " on a uint stream");
                return Value{v};
            }
            case Type::Float: {
                size_t used = 0;
                double v = std::stod(text, &used);
                if (used != text.size())
                    throw TraceError(where + "bad float value '" + text + "'");
                return Value{v};
            }
        }
    } catch (const std::invalid_argument&) {
        throw TraceError(where + "bad value '" + text + "'");
    } catch (const std::out_of_range&) {
        throw TraceError(where + "value out of range '" + text + "'");
    }
    throw TraceError(where + "bad value");
}

}  // namespace detail

// Loads events for the spec's input streams.  The horizon is the largest
// timestamp unless the caller overrides it with a larger one.
inline DistributedStream load_trace_csv(const std::string& text, const Spec& spec,
                                        int horizon_override = -1) {
    DistributedStream ds;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    std::set<std::pair<std::string, int>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != "stream,timestamp,value")
                throw TraceError("line " + std::to_string(lineno) +
                                 ": expected header 'stream,timestamp,value'");
            header_seen = true;
            continue;
        }
        size_t c1 = t.find(',');
        size_t c2 = c1 == std::string::npos ? std::string::npos : t.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw TraceError("line " + std::to_string(lineno) + ": expected 3 fields");
        std::string stream = detail::trim(t.substr(0, c1));
        std::string ts = detail::trim(t.substr(c1 + 1, c2 - c1 - 1));
        std::string val = detail::trim(t.substr(c2 + 1));

        if (!spec.is_input(stream)) {
            throw TraceError("line " + std::to_string(lineno) + ": '" + stream +
                             "' is not an input stream of the specification");
        }
        int sigma = 0;
        try {
            size_t used = 0;
            sigma = std::stoi(ts, &used);
            if (used != ts.size()) throw std::invalid_argument(ts);
        } catch (const std::exception&) {
            throw TraceError("line " + std::to_string(lineno) + ": bad timestamp '" + ts + "'");
        }
        if (sigma < 0)
            throw TraceError("line " + std::to_string(lineno) + ": negative timestamp");
        if (!seen.insert({stream, sigma}).second)
            throw TraceError("line " + std::to_string(lineno) + ": duplicate event " + stream +
                             "@" + std::to_string(sigma));
        const auto& decl = spec.inputs[static_cast<size_t>(spec.input_index.at(stream))];
        ds.events[stream].push_back(
            {sigma, detail::parse_csv_value(val, decl.type, decl.is_unsigned, stream, lineno)});
        if (sigma > ds.n) ds.n = sigma;
    }
    if (!header_seen) throw TraceError("empty trace: missing header");
    for (auto& [_, evs] : ds.events)
        std::sort(evs.begin(), evs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    if (horizon_override >= 0) {
        if (horizon_override < ds.n)
            throw TraceError("horizon " + std::to_string(horizon_override) +
                             " is smaller than the largest timestamp " + std::to_string(ds.n));
        ds.n = horizon_override;
    }
    return ds;
}

inline std::string dump_trace_csv(const DistributedStream& ds) {
    std::string out = "stream,timestamp,value\n";
    for (const auto& [name, evs] : ds.events)
        for (const auto& [sigma, v] : evs)
            out += name + "," + std::to_string(sigma) + "," + to_string(v) + "\n";
    return out;
}

// View CSV: header `monitor,stream,timestamp`; monitors are 1-based; values
// come from the trace itself.
inline std::vector<View> load_views_csv(const std::string& text, const DistributedStream& ds,
                                        int monitors) {
    std::map<std::pair<std::string, int>, Value> truth;
    for (const auto& [name, evs] : ds.events)
        for (const auto& [sigma, v] : evs) truth[{name, sigma}] = v;

    std::vector<View> views(static_cast<size_t>(monitors));
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != "monitor,stream,timestamp")
                throw TraceError("line " + std::to_string(lineno) +
                                 ": expected header 'monitor,stream,timestamp'");
            header_seen = true;
            continue;
        }
        size_t c1 = t.find(',');
        size_t c2 = c1 == std::string::npos ? std::string::npos : t.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw TraceError("line " + std::to_string(lineno) + ": expected 3 fields");
        int m = 0, sigma = 0;
        try {
            m = std::stoi(detail::trim(t.substr(0, c1)));
            sigma = std::stoi(detail::trim(t.substr(c2 + 1)));
        } catch (const std::exception&) {
            throw TraceError("line " + std::to_string(lineno) + ": bad number");
        }
        std::string stream = detail::trim(t.substr(c1 + 1, c2 - c1 - 1));
        if (m < 1 || m > monitors)
            throw TraceError("line " + std::to_string(lineno) + ": monitor index " +
                             std::to_string(m) + " out of range 1.." + std::to_string(monitors));
        auto it = truth.find({stream, sigma});
        if (it == truth.end())
            throw TraceError("line " + std::to_string(lineno) + ": view references " + stream +
                             "@" + std::to_string(sigma) + " which is not in the trace");
        views[static_cast<size_t>(m - 1)].reads[{stream, sigma}] = it->second;
    }
    if (!header_seen) throw TraceError("empty views file: missing header");
    return views;
}

}  // namespace pslola
