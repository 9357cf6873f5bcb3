#pragma once

// Latent DAGs (directed acyclic graphs whose nodes are split into observed
// and hidden variables), ADMGs (acyclic directed mixed graphs over observed
// variables), and the graph primitives everything else is built on:
// ancestral/descendant closures in induced subgraphs, effective parents,
// c-components, latent projection and d-separation.
//
// All graph values are immutable after construction and every operation is a
// pure function of its inputs.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "varset.hpp"

namespace vermakit {

using Edge = std::pair<NodeId, NodeId>;

namespace detail {

inline void check_acyclic(const std::map<NodeId, VarSet>& children,
                          const VarSet& nodes) {
    // Kahn; anything left over sits on a cycle.
    std::map<NodeId, int> indeg;
    for (const NodeId& n : nodes) indeg[n] = 0;
    for (const auto& [p, cs] : children)
        for (const NodeId& c : cs) indeg[c]++;
    std::deque<NodeId> ready;
    for (const auto& [n, d] : indeg)
        if (d == 0) ready.push_back(n);
    std::size_t seen = 0;
    while (!ready.empty()) {
        NodeId n = ready.front();
        ready.pop_front();
        ++seen;
        auto it = children.find(n);
        if (it == children.end()) continue;
        for (const NodeId& c : it->second)
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (seen != nodes.size()) {
        for (const auto& [n, d] : indeg)
            if (d > 0)
                throw std::invalid_argument("cycle detected through node '" + n.name + "'");
    }
}

}  // namespace detail

// DAG over observed plus hidden variables.
class LatentDag {
  public:
    LatentDag() = default;

    static LatentDag make(VarSet observed, VarSet hidden, const std::vector<Edge>& edges) {
        LatentDag g;
        g.observed_ = std::move(observed);
        g.hidden_ = std::move(hidden);
        VarSet both = g.observed_ & g.hidden_;
        if (!both.empty())
            throw std::invalid_argument("node '" + both.begin()->name +
                                        "' declared both observed and hidden");
        for (const NodeId& n : g.observed_ | g.hidden_) {
            g.parents_[n];
            g.children_[n];
        }
        for (const auto& [a, b] : edges) {
            if (!g.declared(a)) throw std::invalid_argument("undeclared node '" + a.name + "'");
            if (!g.declared(b)) throw std::invalid_argument("undeclared node '" + b.name + "'");
            if (a == b) throw std::invalid_argument("self-loop on '" + a.name + "'");
            if (!g.edges_.insert({a, b}).second)
                throw std::invalid_argument("duplicate edge " + a.name + " -> " + b.name);
            g.children_[a].insert(b);
            g.parents_[b].insert(a);
        }
        detail::check_acyclic(g.children_, g.observed_ | g.hidden_);
        return g;
    }

    const VarSet& observed() const { return observed_; }
    const VarSet& hidden() const { return hidden_; }
    const std::set<Edge>& edges() const { return edges_; }

    bool declared(const NodeId& n) const {
        return contains(observed_, n) || contains(hidden_, n);
    }
    bool is_hidden(const NodeId& n) const { return contains(hidden_, n); }
    bool is_observed(const NodeId& n) const { return contains(observed_, n); }

    const VarSet& parents(const NodeId& n) const { return at(parents_, n); }
    const VarSet& children(const NodeId& n) const { return at(children_, n); }

    bool operator==(const LatentDag& o) const {
        return observed_ == o.observed_ && hidden_ == o.hidden_ && edges_ == o.edges_;
    }

  private:
    static const VarSet& at(const std::map<NodeId, VarSet>& m, const NodeId& n) {
        static const VarSet empty;
        auto it = m.find(n);
        return it == m.end() ? empty : it->second;
    }

    VarSet observed_, hidden_;
    std::set<Edge> edges_;
    std::map<NodeId, VarSet> parents_, children_;
};

// Acyclic directed mixed graph: directed and bidirected edges over observed
// variables only. Bidirected pairs are stored with the smaller name first.
class Admg {
  public:
    Admg() = default;

    static Admg make(VarSet observed, const std::vector<Edge>& directed,
                     const std::vector<Edge>& bidirected) {
        Admg g;
        g.observed_ = std::move(observed);
        std::map<NodeId, VarSet> children;
        for (const NodeId& n : g.observed_) children[n];
        for (const auto& [a, b] : directed) {
            g.check_declared(a);
            g.check_declared(b);
            if (a == b) throw std::invalid_argument("self-loop on '" + a.name + "'");
            if (!g.directed_.insert({a, b}).second)
                throw std::invalid_argument("duplicate edge " + a.name + " -> " + b.name);
            children[a].insert(b);
        }
        for (auto [a, b] : bidirected) {
            g.check_declared(a);
            g.check_declared(b);
            if (a == b)
                throw std::invalid_argument("bidirected self-loop on '" + a.name + "'");
            if (b < a) std::swap(a, b);
            if (!g.bidirected_.insert({a, b}).second)
                throw std::invalid_argument("duplicate bidirected edge " + a.name + " <-> " + b.name);
        }
        detail::check_acyclic(children, g.observed_);
        return g;
    }

    const VarSet& observed() const { return observed_; }
    const std::set<Edge>& directed() const { return directed_; }
    const std::set<Edge>& bidirected() const { return bidirected_; }

    VarSet parents(const NodeId& n) const {
        VarSet r;
        for (const auto& [a, b] : directed_)
            if (b == n) r.insert(a);
        return r;
    }

    bool operator==(const Admg& o) const {
        return observed_ == o.observed_ && directed_ == o.directed_ &&
               bidirected_ == o.bidirected_;
    }

  private:
    void check_declared(const NodeId& n) const {
        if (!contains(observed_, n))
            throw std::invalid_argument("undeclared node '" + n.name + "'");
    }

    VarSet observed_;
    std::set<Edge> directed_, bidirected_;
};

// Expands each bidirected edge into a fresh root hidden variable with the two
// endpoints as children. Generated names are deterministic and never collide
// with declared names.
inline LatentDag to_latent(const Admg& g) {
    VarSet hidden;
    std::vector<Edge> edges(g.directed().begin(), g.directed().end());
    std::size_t k = 0;
    for (const auto& [a, b] : g.bidirected()) {
        NodeId u{"_u" + std::to_string(k++)};
        while (contains(g.observed(), u) || contains(hidden, u))
            u.name.insert(u.name.begin(), '_');
        hidden.insert(u);
        edges.push_back({u, a});
        edges.push_back({u, b});
    }
    return LatentDag::make(g.observed(), hidden, edges);
}

// ---------------------------------------------------------------------------
// Reachability helpers.

namespace detail {

// Nodes reachable from `start` along parent links, passing only through
// `allowed` nodes (the start nodes are always allowed). Includes `start`.
inline VarSet ancestors_within(const LatentDag& g, const VarSet& start,
                               const std::function<bool(const NodeId&)>& allowed) {
    VarSet seen = start;
    std::deque<NodeId> work(start.begin(), start.end());
    while (!work.empty()) {
        NodeId n = work.front();
        work.pop_front();
        for (const NodeId& p : g.parents(n)) {
            if (!allowed(p) || contains(seen, p)) continue;
            seen.insert(p);
            work.push_back(p);
        }
    }
    return seen;
}

inline VarSet descendants_within(const LatentDag& g, const VarSet& start,
                                 const std::function<bool(const NodeId&)>& allowed) {
    VarSet seen = start;
    std::deque<NodeId> work(start.begin(), start.end());
    while (!work.empty()) {
        NodeId n = work.front();
        work.pop_front();
        for (const NodeId& c : g.children(n)) {
            if (!allowed(c) || contains(seen, c)) continue;
            seen.insert(c);
            work.push_back(c);
        }
    }
    return seen;
}

}  // namespace detail

// Hidden variables that are ancestors of s inside the subgraph induced on
// s plus all hidden nodes.
inline VarSet hidden_ancestors(const LatentDag& g, const VarSet& s) {
    VarSet anc = detail::ancestors_within(
        g, s, [&](const NodeId& n) { return g.is_hidden(n) || contains(s, n); });
    return anc & g.hidden();
}

// Removes every hidden variable that is not an ancestor of any observed one.
inline LatentDag prune_hidden_nonancestors(const LatentDag& g) {
    VarSet keep_all = detail::ancestors_within(g, g.observed(),
                                               [](const NodeId&) { return true; });
    VarSet hidden = keep_all & g.hidden();
    if (hidden == g.hidden()) return g;
    std::vector<Edge> edges;
    for (const auto& e : g.edges())
        if ((g.is_observed(e.first) || contains(hidden, e.first)) &&
            (g.is_observed(e.second) || contains(hidden, e.second)))
            edges.push_back(e);
    return LatentDag::make(g.observed(), hidden, edges);
}

// Observed members of `within` that are in s or are ancestors of some member
// of s inside the subgraph induced on `within` and its hidden ancestors.
inline VarSet ancestral_closure(const LatentDag& g, const VarSet& s, const VarSet& within) {
    if (!subset_of(s, within) || !subset_of(within, g.observed()))
        throw std::invalid_argument("ancestral_closure: need s \xE2\x8A\x86 within \xE2\x8A\x86 observed");
    VarSet uw = hidden_ancestors(g, within);
    auto allowed = [&](const NodeId& n) { return contains(within, n) || contains(uw, n); };
    return detail::ancestors_within(g, s, allowed) & within;
}

// Mirror image: observed members of `within` that are in s or descendants of
// a member of s inside the same induced subgraph.
inline VarSet descendant_closure(const LatentDag& g, const VarSet& s, const VarSet& within) {
    if (!subset_of(s, within) || !subset_of(within, g.observed()))
        throw std::invalid_argument("descendant_closure: need s \xE2\x8A\x86 within \xE2\x8A\x86 observed");
    VarSet uw = hidden_ancestors(g, within);
    auto allowed = [&](const NodeId& n) { return contains(within, n) || contains(uw, n); };
    return detail::descendants_within(g, s, allowed) & within;
}

// s together with its effective parents: observed x reaching a member of s
// either by a direct edge or by a directed path whose interior is all hidden.
inline VarSet effective_parents(const LatentDag& g, const VarSet& s) {
    VarSet r = s;
    VarSet frontier_seen;
    std::deque<NodeId> work;
    auto push_parents = [&](const NodeId& n) {
        for (const NodeId& p : g.parents(n)) {
            if (g.is_observed(p)) {
                r.insert(p);
            } else if (!contains(frontier_seen, p)) {
                frontier_seen.insert(p);
                work.push_back(p);
            }
        }
    };
    for (const NodeId& y : s) push_parents(y);
    while (!work.empty()) {
        NodeId u = work.front();
        work.pop_front();
        push_parents(u);
    }
    return r;
}

// Effective-parent edges restricted to `subset`: x -> y for distinct members
// with x an effective parent of y. This is the directed structure the
// projection keeps, and topological orders are taken against it.
inline std::set<Edge> effective_edges(const LatentDag& g, const VarSet& subset) {
    std::set<Edge> r;
    for (const NodeId& y : subset) {
        VarSet pa = effective_parents(g, {y});
        for (const NodeId& x : pa & subset)
            if (x != y) r.insert({x, y});
    }
    return r;
}

namespace detail {

inline std::vector<NodeId> lex_least_topological(const VarSet& nodes,
                                                 const std::set<Edge>& edges) {
    std::map<NodeId, int> indeg;
    std::map<NodeId, VarSet> out;
    for (const NodeId& n : nodes) indeg[n] = 0;
    for (const auto& [a, b] : edges) {
        out[a].insert(b);
        indeg[b]++;
    }
    VarSet ready;
    for (const auto& [n, d] : indeg)
        if (d == 0) ready.insert(n);
    std::vector<NodeId> order;
    while (!ready.empty()) {
        NodeId n = *ready.begin();  // lexicographically least available node
        ready.erase(ready.begin());
        order.push_back(n);
        for (const NodeId& c : out[n])
            if (--indeg[c] == 0) ready.insert(c);
    }
    if (order.size() != nodes.size())
        throw std::logic_error("topological order on cyclic relation");
    return order;
}

inline void enumerate_topological(const VarSet& nodes, const std::set<Edge>& edges,
                                  std::size_t cap,
                                  std::vector<std::vector<NodeId>>& out_orders) {
    std::map<NodeId, int> indeg;
    std::map<NodeId, VarSet> out;
    for (const NodeId& n : nodes) indeg[n] = 0;
    for (const auto& [a, b] : edges) {
        out[a].insert(b);
        indeg[b]++;
    }
    std::vector<NodeId> acc;
    std::function<void()> rec = [&]() {
        if (out_orders.size() >= cap) return;
        if (acc.size() == nodes.size()) {
            out_orders.push_back(acc);
            return;
        }
        for (const auto& [n, d] : indeg) {
            if (d != 0) continue;
            indeg[n] = -1;
            for (const NodeId& c : out[n]) indeg[c]--;
            acc.push_back(n);
            rec();
            acc.pop_back();
            for (const NodeId& c : out[n]) indeg[c]++;
            indeg[n] = 0;
            if (out_orders.size() >= cap) return;
        }
    };
    rec();
}

}  // namespace detail

// Lexicographically least topological order of `subset` with respect to the
// effective-parent edges among its members.
inline std::vector<NodeId> topological_order(const LatentDag& g, const VarSet& subset) {
    if (!subset_of(subset, g.observed()))
        throw std::invalid_argument("topological_order: subset must be observed");
    return detail::lex_least_topological(subset, effective_edges(g, subset));
}

inline std::vector<NodeId> topological_order(const Admg& g, const VarSet& subset) {
    if (!subset_of(subset, g.observed()))
        throw std::invalid_argument("topological_order: subset must be observed");
    std::set<Edge> edges;
    for (const auto& e : g.directed())
        if (contains(subset, e.first) && contains(subset, e.second)) edges.insert(e);
    return detail::lex_least_topological(subset, edges);
}

// All topological orders of the observed nodes over effective-parent edges,
// in lexicographic order, at most `cap` of them.
inline std::vector<std::vector<NodeId>> all_topological_orders(const LatentDag& g,
                                                               std::size_t cap) {
    std::vector<std::vector<NodeId>> orders;
    detail::enumerate_topological(g.observed(), effective_edges(g, g.observed()), cap, orders);
    return orders;
}

// ---------------------------------------------------------------------------
// C-components.

namespace detail {

struct UnionFind {
    std::map<NodeId, NodeId> up;
    void add(const NodeId& x) { up.emplace(x, x); }
    NodeId find(const NodeId& x) {
        NodeId r = x;
        while (up.at(r) != r) r = up.at(r);
        NodeId c = x;
        while (up.at(c) != c) {
            NodeId next = up.at(c);
            up[c] = r;
            c = next;
        }
        return r;
    }
    void unite(const NodeId& a, const NodeId& b) {
        NodeId ra = find(a), rb = find(b);
        if (ra != rb) up[std::max(ra, rb)] = std::min(ra, rb);
    }
};

// Canonical presentation of a partition: blocks sorted by size, then by
// member sequence.
inline std::vector<VarSet> sorted_blocks(std::vector<VarSet> blocks) {
    std::sort(blocks.begin(), blocks.end(), [](const VarSet& a, const VarSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    return blocks;
}

}  // namespace detail

// Partition of `subset` into c-components, computed in the subgraph induced
// on subset and its hidden ancestors. Hidden variables are grouped by the
// closure of "directly linked" / "share a child"; an observed node joins the
// group of its hidden parents, and one with no hidden parent in the subgraph
// stands alone.
inline std::vector<VarSet> c_components(const LatentDag& g, const VarSet& subset) {
    if (!subset_of(subset, g.observed()))
        throw std::invalid_argument("c_components: subset must be observed");
    VarSet us = hidden_ancestors(g, subset);

    detail::UnionFind uf;
    for (const NodeId& u : us) uf.add(u);
    for (const auto& [a, b] : g.edges())
        if (contains(us, a) && contains(us, b)) uf.unite(a, b);
    for (const NodeId& n : subset | us) {
        std::optional<NodeId> first;
        for (const NodeId& p : g.parents(n)) {
            if (!contains(us, p)) continue;
            if (first)
                uf.unite(*first, p);
            else
                first = p;
        }
    }

    std::map<NodeId, VarSet> groups;  // hidden-group root -> observed members
    std::vector<VarSet> singletons;
    for (const NodeId& v : subset) {
        std::optional<NodeId> root;
        for (const NodeId& p : g.parents(v))
            if (contains(us, p)) {
                root = uf.find(p);
                break;
            }
        if (root)
            groups[*root].insert(v);
        else
            singletons.push_back({v});
    }
    std::vector<VarSet> blocks = singletons;
    for (auto& [r, members] : groups) blocks.push_back(members);
    return detail::sorted_blocks(blocks);
}

// Connected components of the bidirected part restricted to `subset`.
inline std::vector<VarSet> admg_c_components(const Admg& g, const VarSet& subset) {
    if (!subset_of(subset, g.observed()))
        throw std::invalid_argument("admg_c_components: subset must be observed");
    detail::UnionFind uf;
    for (const NodeId& n : subset) uf.add(n);
    for (const auto& [a, b] : g.bidirected())
        if (contains(subset, a) && contains(subset, b)) uf.unite(a, b);
    std::map<NodeId, VarSet> groups;
    for (const NodeId& n : subset) groups[uf.find(n)].insert(n);
    std::vector<VarSet> blocks;
    for (auto& [r, members] : groups) blocks.push_back(members);
    return detail::sorted_blocks(blocks);
}

inline std::vector<VarSet> c_components(const Admg& g, const VarSet& subset) {
    return admg_c_components(g, subset);
}

// ---------------------------------------------------------------------------
// Latent projection.

// Projection onto the observed variables: keeps observed-to-observed edges,
// adds x -> y for directed paths with all-hidden interior, and x <-> y for
// divergent all-hidden paths.
inline Admg project(const LatentDag& g) {
    std::set<Edge> directed;
    for (const auto& [a, b] : g.edges())
        if (g.is_observed(a) && g.is_observed(b)) directed.insert({a, b});
    for (const NodeId& y : g.observed())
        for (const NodeId& x : effective_parents(g, {y}))
            if (x != y) directed.insert({x, y});

    // Observed nodes reachable from each hidden node through hidden interiors.
    std::map<NodeId, VarSet> reach;
    for (const NodeId& u : g.hidden()) {
        VarSet seen{u};
        VarSet obs;
        std::deque<NodeId> work{u};
        while (!work.empty()) {
            NodeId n = work.front();
            work.pop_front();
            for (const NodeId& c : g.children(n)) {
                if (g.is_observed(c)) {
                    obs.insert(c);
                } else if (!contains(seen, c)) {
                    seen.insert(c);
                    work.push_back(c);
                }
            }
        }
        reach[u] = obs;
    }
    std::set<Edge> bidirected;
    for (const auto& [u, obs] : reach)
        for (auto it = obs.begin(); it != obs.end(); ++it)
            for (auto jt = std::next(it); jt != obs.end(); ++jt)
                bidirected.insert({*it, *jt});

    return Admg::make(g.observed(), {directed.begin(), directed.end()},
                      {bidirected.begin(), bidirected.end()});
}

// ---------------------------------------------------------------------------
// d-separation.

// True iff every path between x and y is blocked by z. Standard reachability
// over (node, arrival direction) states on the full latent DAG.
inline bool d_separated(const LatentDag& g, const NodeId& x, const NodeId& y,
                        const VarSet& z) {
    if (x == y || contains(z, x) || contains(z, y))
        throw std::invalid_argument("d_separated: x, y must be distinct and outside z");
    if (!g.is_observed(x) || !g.is_observed(y) || !subset_of(z, g.observed()))
        throw std::invalid_argument("d_separated: arguments must be observed");

    VarSet anz = detail::ancestors_within(g, z, [](const NodeId&) { return true; });

    enum Dir { kUp, kDown };  // kUp: left along an incoming edge (toward parents)
    std::set<std::pair<NodeId, int>> visited;
    std::deque<std::pair<NodeId, int>> work{{x, kUp}};
    while (!work.empty()) {
        auto [n, dir] = work.front();
        work.pop_front();
        if (!visited.insert({n, dir}).second) continue;
        if (n == y) return false;
        bool in_z = contains(z, n);
        if (dir == kUp && !in_z) {
            for (const NodeId& p : g.parents(n)) work.push_back({p, kUp});
            for (const NodeId& c : g.children(n)) work.push_back({c, kDown});
        } else if (dir == kDown) {
            if (!in_z)
                for (const NodeId& c : g.children(n)) work.push_back({c, kDown});
            if (contains(anz, n))  // collider open iff it has a conditioned descendant
                for (const NodeId& p : g.parents(n)) work.push_back({p, kUp});
        }
    }
    return true;
}

inline bool d_separated(const Admg& g, const NodeId& x, const NodeId& y, const VarSet& z) {
    return d_separated(to_latent(g), x, y, z);
}

// Admg counterparts of the subgraph closures, via the hidden-node expansion.
inline VarSet ancestral_closure(const Admg& g, const VarSet& s, const VarSet& within) {
    return ancestral_closure(to_latent(g), s, within);
}
inline VarSet descendant_closure(const Admg& g, const VarSet& s, const VarSet& within) {
    return descendant_closure(to_latent(g), s, within);
}
inline VarSet effective_parents(const Admg& g, const VarSet& s) {
    VarSet r = s;
    for (const NodeId& y : s)
        for (const NodeId& p : g.parents(y)) r.insert(p);
    return r;
}

}  // namespace vermakit
