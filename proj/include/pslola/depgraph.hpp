#pragma once

// Dependency graphs over stream specifications.
//
// Every stream is a node.  Every reference inside a defining expression adds
// one edge from the defined output to the referenced stream, weighted by the
// reference's offset (bare references weigh 0); parallel edges are kept.
// Under clock skew bound eps, a single weight-w edge is read as the set of
// possible effective shifts {w-eps+1, ..., w+eps-1}.
//
// A specification is well formed iff no closed walk has total weight zero.
// Since every closed walk decomposes into simple cycles inside one strongly
// connected component, that holds iff no SCC contains a zero-weight simple
// cycle or two simple cycles with opposite-sign totals (repeating the
// positive cycle |w-| times and the negative one |w+| times closes a
// zero-weight walk).

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pslola/ast.hpp"

namespace pslola {

struct DepEdge {
    std::string from;
    std::string to;
    int weight = 0;
};

struct DepGraph {
    std::vector<std::string> nodes;  // inputs then outputs, declaration order
    std::vector<DepEdge> edges;      // defining expressions in order, references left to right
};

inline std::vector<int> ps_weight_set(int weight, int eps) {
    std::vector<int> out;
    for (int w = weight - eps + 1; w <= weight + eps - 1; ++w) out.push_back(w);
    return out;
}

namespace detail {

inline void collect_refs(const Expr& e, std::vector<const RefNode*>& out) {
    if (const auto* r = std::get_if<RefNode>(&e.node)) {
        out.push_back(r);
    } else if (const auto* u = std::get_if<UnaryNode>(&e.node)) {
        collect_refs(*u->operand, out);
    } else if (const auto* b = std::get_if<BinaryNode>(&e.node)) {
        collect_refs(*b->lhs, out);
        collect_refs(*b->rhs, out);
    } else if (const auto* f = std::get_if<CallNode>(&e.node)) {
        for (const auto& a : f->args) collect_refs(*a, out);
    } else if (const auto* t = std::get_if<IteNode>(&e.node)) {
        collect_refs(*t->cond, out);
        collect_refs(*t->then_branch, out);
        collect_refs(*t->else_branch, out);
    }
}

}  // namespace detail

inline std::vector<const RefNode*> collect_refs(const Expr& e) {
    std::vector<const RefNode*> out;
    detail::collect_refs(e, out);
    return out;
}

inline DepGraph build_dependency_graph(const Spec& spec) {
    DepGraph g;
    for (const auto& in : spec.inputs) g.nodes.push_back(in.name);
    for (const auto& o : spec.outputs) g.nodes.push_back(o.name);
    for (const auto& o : spec.outputs) {
        for (const RefNode* r : collect_refs(*o.expr))
            g.edges.push_back(DepEdge{o.name, r->stream, r->offset});
    }
    return g;
}

// One simple cycle: nodes[i] --weights[i]--> nodes[i+1 mod size].
struct Cycle {
    std::vector<std::string> nodes;
    std::vector<int> weights;
    int total = 0;

    std::string to_string() const {
        std::string out;
        for (size_t i = 0; i < nodes.size(); ++i) {
            out += nodes[i] + " -(" + std::to_string(weights[i]) + ")-> ";
        }
        out += nodes.empty() ? "" : nodes[0];
        return out;
    }
};

struct WellFormedness {
    bool ok = true;
    // When ill-formed: either one zero-weight cycle, or an opposite-sign pair
    // whose combination closes a zero-weight walk.
    std::optional<Cycle> zero_cycle;
    std::optional<std::pair<Cycle, Cycle>> opposite_pair;
    std::string description = "well-formed: every closed dependency walk has nonzero total shift";
};

namespace detail {

struct GraphIndex {
    std::vector<std::string> nodes;
    std::map<std::string, int> id;
    // adjacency as indices into `edges`
    std::vector<std::vector<int>> out;
    const std::vector<DepEdge>* edges = nullptr;

    explicit GraphIndex(const DepGraph& g) : nodes(g.nodes), edges(&g.edges) {
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i) id[nodes[i]] = i;
        out.resize(nodes.size());
        for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
            out[id.at(g.edges[e].from)].push_back(e);
    }
};

// Strongly connected components by Kosaraju's method (graphs here are tiny).
inline std::vector<int> scc_ids(const GraphIndex& gi) {
    int n = static_cast<int>(gi.nodes.size());
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (const auto& e : *gi.edges) {
        int u = gi.id.at(e.from), v = gi.id.at(e.to);
        fwd[u].push_back(v);
        rev[v].push_back(u);
    }
    std::vector<int> order;
    std::vector<char> seen(n, 0);
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        // Iterative post-order.
        std::vector<std::pair<int, size_t>> stack{{s, 0}};
        seen[s] = 1;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            if (next < fwd[u].size()) {
                int v = fwd[u][next++];
                if (!seen[v]) { seen[v] = 1; stack.push_back({v, 0}); }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }
    std::vector<int> comp(n, -1);
    int c = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[*it] != -1) continue;
        std::vector<int> stack{*it};
        comp[*it] = c;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : rev[u])
                if (comp[v] == -1) { comp[v] = c; stack.push_back(v); }
        }
        ++c;
    }
    return comp;
}

// Enumerates all simple cycles (distinct non-start nodes; parallel edges give
// distinct cycles).  Cycle counts explode only on dense graphs; specs are
// small, and the cap turns a pathological input into an explicit error.
inline std::vector<Cycle> simple_cycles(const GraphIndex& gi, size_t cap = 200000) {
    std::vector<Cycle> cycles;
    int n = static_cast<int>(gi.nodes.size());
    std::vector<char> on_path(n, 0);
    std::vector<int> path_nodes;
    std::vector<int> path_edges;

    for (int s = 0; s < n; ++s) {
        // Restrict to nodes >= s so each cycle is found exactly once, rooted
        // at its smallest node.
        struct Frame { int node; size_t next; };
        std::vector<Frame> stack{{s, 0}};
        on_path[s] = 1;
        path_nodes = {s};
        path_edges.clear();
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& outs = gi.out[f.node];
            if (f.next >= outs.size()) {
                on_path[f.node] = 0;
                path_nodes.pop_back();
                if (!path_edges.empty()) path_edges.pop_back();
                stack.pop_back();
                continue;
            }
            int e = outs[f.next++];
            int v = gi.id.at((*gi.edges)[e].to);
            if (v < s) continue;
            if (v == s) {
                Cycle c;
                for (size_t i = 0; i < path_nodes.size(); ++i) c.nodes.push_back(gi.nodes[path_nodes[i]]);
                for (int pe : path_edges) c.weights.push_back((*gi.edges)[pe].weight);
                c.weights.push_back((*gi.edges)[e].weight);
                for (int w : c.weights) c.total += w;
                cycles.push_back(std::move(c));
                if (cycles.size() > cap)
                    throw std::runtime_error("dependency graph has too many simple cycles");
                continue;
            }
            if (on_path[v]) continue;
            on_path[v] = 1;
            path_nodes.push_back(v);
            path_edges.push_back(e);
            stack.push_back({v, 0});
        }
        on_path[s] = 0;
    }
    return cycles;
}

}  // namespace detail

inline WellFormedness check_well_formed(const DepGraph& g) {
    detail::GraphIndex gi(g);
    std::vector<int> comp = detail::scc_ids(gi);
    std::vector<Cycle> cycles = detail::simple_cycles(gi);

    WellFormedness wf;
    for (const auto& c : cycles) {
        if (c.total == 0) {
            wf.ok = false;
            wf.zero_cycle = c;
            wf.description = "ill-formed: zero-total dependency cycle " + c.to_string();
            return wf;
        }
    }
    // Group by SCC of the cycle's first node (all nodes of a cycle share one).
    std::map<int, std::pair<std::optional<Cycle>, std::optional<Cycle>>> by_comp;
    for (const auto& c : cycles) {
        int cc = comp[gi.id.at(c.nodes[0])];
        auto& [pos, neg] = by_comp[cc];
        if (c.total > 0 && !pos) pos = c;
        if (c.total < 0 && !neg) neg = c;
        if (pos && neg) {
            wf.ok = false;
            wf.opposite_pair = {*pos, *neg};
            wf.description =
                "ill-formed: cycles of opposite total shift share a strongly connected "
                "component; repeating [" + pos->to_string() + "] (total " +
                std::to_string(pos->total) + ") " + std::to_string(-neg->total) +
                " time(s) and [" + neg->to_string() + "] (total " +
                std::to_string(neg->total) + ") " + std::to_string(pos->total) +
                " time(s) closes a zero-weight walk";
            return wf;
        }
    }
    return wf;
}

}  // namespace pslola
