#pragma once

// The c-factor calculus: building Q[S] for the c-components of a latent DAG
// as products of observed conditionals, marginalizing Q over descendent sets,
// and splitting Q[H] into the c-factors of its own subgraph via chain
// quotients. Every quantity carries the set it is scoped to, the argument
// set it is claimed to depend on, and the topological order in force.

#include "graph.hpp"
#include "qexpr.hpp"

namespace vermakit {

struct QTagged {
    QExpr expr;
    VarSet scope;         // the S of Q[S]
    VarSet claimed_args;  // effective-parent closure of scope
    Order order;          // topological order the expression was built under
};

namespace detail {

inline void check_full_order(const LatentDag& g, const std::vector<NodeId>& order) {
    if (to_varset(order) != g.observed() || order.size() != g.observed().size())
        throw std::invalid_argument("order must cover the observed nodes exactly");
    VarSet prefix;
    for (const NodeId& n : order) {
        VarSet pa = effective_parents(g, {n}) - VarSet{n};
        if (!subset_of(pa & g.observed(), prefix | VarSet{n}))
            throw std::invalid_argument("not a topological order: '" + n.name +
                                        "' precedes one of its effective parents");
        prefix.insert(n);
    }
}

}  // namespace detail

// The chain factor for each observed node V against a full topological order:
// P(v | preceding variables), reduced to condition only on the effective
// parents of the c-component of V inside the prefix subgraph.
inline std::map<NodeId, QExpr> chain_factors(const LatentDag& g, const QBuilder& qb) {
    std::map<NodeId, QExpr> out;
    VarSet prefix;
    for (const NodeId& v : qb.order().seq()) {
        prefix.insert(v);
        VarSet comp;
        for (const VarSet& block : c_components(g, prefix))
            if (contains(block, v)) {
                comp = block;
                break;
            }
        VarSet given = effective_parents(g, comp) - VarSet{v};
        out[v] = qb.factor(v, given);
    }
    return out;
}

// Q[S] for every c-component S of the full graph, as a product of chain
// factors of its members.
inline std::map<VarSet, QTagged> q_factorize(const LatentDag& g,
                                             const std::vector<NodeId>& order) {
    detail::check_full_order(g, order);
    QBuilder qb{Order{order}};
    std::map<NodeId, QExpr> fac = chain_factors(g, qb);
    std::map<VarSet, QTagged> out;
    for (const VarSet& comp : c_components(g, g.observed())) {
        std::vector<QExpr> terms;
        for (const NodeId& v : comp) terms.push_back(fac.at(v));
        out[comp] = QTagged{qb.product(std::move(terms)), comp, effective_parents(g, comp),
                            qb.order()};
    }
    return out;
}

// Q[W] from Q[scope] by summing over scope \ w. Only licensed when w is an
// ancestral set in the subgraph of the scope, equivalently when scope \ w is
// closed under observed descendants there.
inline QTagged q_marginalize(const QTagged& q, const LatentDag& g, const VarSet& w) {
    if (!subset_of(w, q.scope))
        throw std::invalid_argument("marginalize: target must be a subset of the scope");
    if (w == q.scope) return q;
    if (ancestral_closure(g, w, q.scope) != w)
        throw std::invalid_argument("marginalize: " + braced(w) +
                                    " is not an ancestral set within " + braced(q.scope));
    QBuilder qb{q.order};
    return QTagged{qb.sum(q.scope - w, q.expr), w, effective_parents(g, w), q.order};
}

// Splits Q[H] into the c-factors of the c-components of H's own subgraph.
// With H ordered h_1 < ... < h_k there, each prefix sum Σ Q[H] over the tail
// is itself a Q, and the factor of a component is the product of the
// per-member quotients of consecutive prefix sums.
inline std::map<VarSet, QTagged> q_decompose(const QTagged& q, const LatentDag& g) {
    const VarSet& h = q.scope;
    std::vector<VarSet> comps = c_components(g, h);
    if (comps.size() <= 1) return {{h, q}};

    QBuilder qb{q.order};
    std::vector<NodeId> horder = topological_order(g, h);
    // prefix_q[i] = Q of the first i members; prefix_q[0] = 1.
    std::vector<QExpr> prefix_q{qb.one()};
    VarSet prefix;
    for (const NodeId& v : horder) {
        prefix.insert(v);
        prefix_q.push_back(qb.sum(h - prefix, q.expr));
    }
    std::map<VarSet, QTagged> out;
    for (const VarSet& comp : comps) {
        std::vector<QExpr> terms;
        for (std::size_t i = 0; i < horder.size(); ++i)
            if (contains(comp, horder[i]))
                terms.push_back(qb.quotient(prefix_q[i + 1], prefix_q[i]));
        out[comp] = QTagged{qb.product(std::move(terms)), comp, effective_parents(g, comp),
                            q.order};
    }
    return out;
}

}  // namespace vermakit
