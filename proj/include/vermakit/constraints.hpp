#pragma once

// The constraint-finding procedure. Walking a topological order V_1 < ... <
// V_n, each step first reads off the conditional independence implied by the
// chain factorization of V_i's c-component in the prefix subgraph, then
// recursively marginalizes that component's Q over descendent sets and splits
// the results into c-factors, emitting a functional (Verma-type) constraint
// whenever a computed expression syntactically involves more variables than
// the set it provably depends on.

#include <cstdint>

#include "q_algebra.hpp"

namespace vermakit {

struct DerivationStep {
    std::string step;    // operation: factorize / marginalize / quotient / decompose / ci
    std::string rule;    // identity used: chain-factorization / ancestral-margin / ...
    std::string detail;
};

struct Constraint {
    enum class Kind { conditional_independence, functional };
    Kind kind = Kind::functional;

    // functional: expression q whose value depends only on q.claimed_args even
    // though extraneous = free_args(q.expr) \ claimed_args is non-empty.
    std::optional<QTagged> q;
    VarSet extraneous;

    // conditional independence: x independent of `others` given `given`.
    std::optional<NodeId> x;
    VarSet others, given;

    std::vector<DerivationStep> derivation;
    std::optional<std::size_t> subsumed_by;  // index into the emitted list
    std::vector<NodeId> order;               // generating topological order
};

struct FinderConfig {
    enum class OrderMode { canonical, all_orders };
    enum class Dedup { none, numeric };
    OrderMode order_mode = OrderMode::canonical;
    std::size_t order_cap = 64;          // all_orders: at most this many orders
    std::size_t max_component_size = 16; // descendent-set enumeration is 2^|S|
    Dedup dedup = Dedup::none;
    std::uint64_t dedup_seed = 1729;
    std::size_t dedup_trials = 20;
};

struct ComponentCapError : std::runtime_error {
    VarSet component;
    ComponentCapError(VarSet comp, std::size_t cap)
        : std::runtime_error("component " + braced(comp) + " exceeds the size cap of " +
                             std::to_string(cap)),
          component(std::move(comp)) {}
};

inline std::string render_ci(const Constraint& c) {
    return c.x->name + " \xE2\xAB\xAB " + braced(c.others) + " | " + braced(c.given);
}

inline std::string render_constraint(const Constraint& c) {
    if (c.kind == Constraint::Kind::conditional_independence) return render_ci(c);
    return render(c.q->expr) + " is independent of " + braced(c.extraneous, true);
}

namespace detail {

inline VarSet component_of(const std::vector<VarSet>& blocks, const NodeId& v) {
    for (const VarSet& b : blocks)
        if (contains(b, v)) return b;
    throw std::logic_error("node '" + v.name + "' missing from its partition");
}

// All non-empty proper subsets of scope \ {keep_out} that are closed under
// observed descendants within the scope's subgraph, smallest first, then
// lexicographic.
inline std::vector<VarSet> descendent_sets_excluding(const LatentDag& g, const VarSet& scope,
                                                     const NodeId& keep_out) {
    std::vector<NodeId> pool;
    for (const NodeId& n : scope)
        if (n != keep_out) pool.push_back(n);
    if (pool.size() >= 63)
        throw ComponentCapError(scope, 62);  // subset masks live in a 64-bit word
    std::vector<VarSet> out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << pool.size()); ++mask) {
        VarSet d;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (mask & (std::uint64_t{1} << i)) d.insert(pool[i]);
        if (descendant_closure(g, d, scope) == d) out.push_back(d);
    }
    std::sort(out.begin(), out.end(), [](const VarSet& a, const VarSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    return out;
}

struct A2Engine {
    const LatentDag& g;
    const FinderConfig& cfg;
    NodeId vi;
    std::vector<Constraint>& out;
    std::vector<QTagged>* trace;
    std::set<std::pair<VarSet, std::string>> visited;

    void note(const QTagged& q) {
        if (trace) trace->push_back(q);
    }

    void emit(QTagged q, VarSet extraneous, std::vector<DerivationStep> trail,
              const std::vector<NodeId>& order) {
        Constraint c;
        c.kind = Constraint::Kind::functional;
        c.q = std::move(q);
        c.extraneous = std::move(extraneous);
        c.derivation = std::move(trail);
        c.order = order;
        out.push_back(std::move(c));
    }

    void run(const QTagged& q, const std::vector<DerivationStep>& trail) {
        if (q.scope.size() > cfg.max_component_size)
            throw ComponentCapError(q.scope, cfg.max_component_size);
        if (!visited.insert({q.scope, render(q.expr)}).second) return;

        for (const VarSet& d : descendent_sets_excluding(g, q.scope, vi)) {
            VarSet dp = q.scope - d;
            QTagged qdp = q_marginalize(q, g, dp);
            note(qdp);
            std::vector<DerivationStep> t = trail;
            t.push_back({"marginalize", "ancestral-margin",
                         "Q" + braced(q.scope) + " -> Q" + braced(dp) + ": sum over " +
                             braced(d, true)});
            VarSet ext = free_args(qdp.expr) - qdp.claimed_args;
            if (!ext.empty()) emit(qdp, ext, t, q.order.seq());

            std::vector<VarSet> comps = c_components(g, dp);
            if (comps.size() > 1) {
                VarSet e = component_of(comps, vi);
                QTagged den = q_marginalize(qdp, g, dp - VarSet{vi});
                note(den);
                QBuilder qb{q.order};
                QTagged quot{qb.quotient(qdp.expr, den.expr), e, effective_parents(g, e),
                             q.order};
                VarSet ext2 = free_args(quot.expr) - quot.claimed_args;
                if (!ext2.empty()) {
                    std::vector<DerivationStep> tq = t;
                    tq.push_back({"quotient", "component-quotient",
                                  "Q" + braced(dp) + " / Q" + braced(dp - VarSet{vi}) +
                                      " is a function of " + braced(quot.claimed_args)});
                    emit(quot, ext2, tq, q.order.seq());
                }
                std::map<VarSet, QTagged> parts = q_decompose(qdp, g);
                for (const auto& [comp, part] : parts) note(part);
                std::vector<DerivationStep> tr = t;
                tr.push_back({"decompose", "component-quotient",
                              "c-factor Q" + braced(e) + " of Q" + braced(dp)});
                run(parts.at(e), tr);
            } else {
                run(qdp, t);
            }
        }
    }
};

inline std::string constraint_identity(const Constraint& c) {
    std::string key = c.kind == Constraint::Kind::functional ? "f|" : "ci|";
    if (c.kind == Constraint::Kind::functional)
        key += render(c.q->expr) + "|" + braced(c.q->scope) + "|" + braced(c.q->claimed_args) +
               "|" + braced(c.extraneous);
    else
        key += c.x->name + "|" + braced(c.others) + "|" + braced(c.given);
    for (const NodeId& n : c.order) key += "<" + n.name;
    return key;
}

}  // namespace detail

// Step one of a finder pass: the c-component S of V_i inside the prefix
// subgraph, its Q as a product of chain factors, and the conditional
// independence of V_i from the predecessors outside Pa+(S), when any exist.
inline std::pair<std::optional<Constraint>, QTagged> step_a1(const LatentDag& g,
                                                             const std::vector<NodeId>& order,
                                                             std::size_t i) {
    if (i >= order.size()) throw std::invalid_argument("step index out of range");
    detail::check_full_order(g, order);
    QBuilder qb{Order{order}};
    std::map<NodeId, QExpr> fac = chain_factors(g, qb);

    const NodeId& vi = order[i];
    VarSet prefix(order.begin(), order.begin() + static_cast<long>(i) + 1);
    VarSet comp = detail::component_of(c_components(g, prefix), vi);
    std::vector<QExpr> terms;
    for (const NodeId& v : comp) terms.push_back(fac.at(v));
    QTagged q{qb.product(std::move(terms)), comp, effective_parents(g, comp), qb.order()};

    std::optional<Constraint> ci;
    VarSet others = prefix - q.claimed_args;
    if (!others.empty()) {
        Constraint c;
        c.kind = Constraint::Kind::conditional_independence;
        c.x = vi;
        c.others = others;
        c.given = q.claimed_args - VarSet{vi};
        c.derivation.push_back(
            {"ci", "chain-factorization",
             vi.name + " is conditioned only on " + braced(c.given) + " within the prefix " +
                 braced(prefix)});
        c.order = order;
        ci = std::move(c);
    }
    return {std::move(ci), std::move(q)};
}

// Step two: all functional constraints reachable from Q[S_i] by summing over
// descendent sets and splitting into c-factors, recursively.
inline std::vector<Constraint> step_a2(const QTagged& q, const LatentDag& g, const NodeId& vi,
                                       const FinderConfig& cfg,
                                       std::vector<QTagged>* trace = nullptr) {
    if (!contains(q.scope, vi))
        throw std::invalid_argument("step_a2: pivot must be in the scope");
    std::vector<Constraint> out;
    detail::A2Engine engine{g, cfg, vi, out, trace, {}};
    std::vector<DerivationStep> trail{
        {"factorize", "chain-factorization",
         "Q" + braced(q.scope) + " = " + render(q.expr)}};
    engine.run(q, trail);
    return out;
}

// Runs the full procedure. The same constraint reached along two derivation
// paths is reported once (first derivation wins); subsumption annotation is a
// separate, purely additive pass (see oracle.hpp).
inline std::vector<Constraint> find_constraints(const LatentDag& g_in, const FinderConfig& cfg,
                                                std::vector<QTagged>* trace = nullptr) {
    if (cfg.order_cap < 1 || cfg.max_component_size < 1 || cfg.dedup_trials < 1)
        throw std::invalid_argument("finder config: caps and trial counts must be at least 1");
    LatentDag g = prune_hidden_nonancestors(g_in);
    std::vector<std::vector<NodeId>> orders;
    if (cfg.order_mode == FinderConfig::OrderMode::canonical)
        orders.push_back(topological_order(g, g.observed()));
    else
        orders = all_topological_orders(g, cfg.order_cap);

    std::vector<Constraint> all;
    for (const std::vector<NodeId>& order : orders) {
        std::vector<Constraint> run;
        for (std::size_t i = 0; i < order.size(); ++i) {
            auto [ci, q] = step_a1(g, order, i);
            if (trace) trace->push_back(q);
            if (ci) run.push_back(std::move(*ci));
            std::vector<Constraint> a2 = step_a2(q, g, order[i], cfg, trace);
            for (Constraint& c : a2) run.push_back(std::move(c));
        }
        std::set<std::string> seen;
        for (Constraint& c : run)
            if (seen.insert(detail::constraint_identity(c)).second)
                all.push_back(std::move(c));
    }
    return all;
}

inline std::vector<Constraint> find_constraints(const Admg& g, const FinderConfig& cfg,
                                                std::vector<QTagged>* trace = nullptr) {
    return find_constraints(to_latent(g), cfg, trace);
}

}  // namespace vermakit
