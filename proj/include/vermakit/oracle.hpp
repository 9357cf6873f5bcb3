#pragma once

// Exact ground truth for small discrete models: random CPT parameterizations
// of a latent DAG, the observed joint by full enumeration, direct evaluation
// of Q[S] from the latent parameters, numeric evaluation of symbolic
// expressions against a joint, and constraint verification.

#include <cmath>
#include <cstdint>
#include <random>

#include "constraints.hpp"

namespace vermakit {

using Assignment = std::map<NodeId, int>;

struct CapExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense table of doubles indexed by joint assignments to `vars` (mixed radix,
// first variable slowest).
struct Table {
    std::vector<NodeId> vars;  // canonical (sorted) order
    std::vector<int> cards;
    std::vector<double> values;

    static Table zeros(const VarSet& vs, const std::map<NodeId, int>& domains,
                       std::size_t cap) {
        Table t;
        std::size_t total = 1;
        for (const NodeId& v : vs) {
            t.vars.push_back(v);
            int card = domains.at(v);
            t.cards.push_back(card);
            total *= static_cast<std::size_t>(card);
            if (total > cap)
                throw CapExceededError("state space over " + braced(vs) +
                                       " exceeds the cap of " + std::to_string(cap));
        }
        t.values.assign(total, 0.0);
        return t;
    }

    std::size_t index(const Assignment& a) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            auto it = a.find(vars[i]);
            if (it == a.end())
                throw std::invalid_argument("assignment missing '" + vars[i].name + "'");
            idx = idx * static_cast<std::size_t>(cards[i]) + static_cast<std::size_t>(it->second);
        }
        return idx;
    }

    double at(const Assignment& a) const { return values[index(a)]; }
    double& at(const Assignment& a) { return values[index(a)]; }
};

// Iterates all assignments to `vars` (cards looked up in `domains`), reusing
// one Assignment object. Bindings shadow any outer values for the same
// variables and are restored afterwards, so a sum may safely bind a variable
// that is free elsewhere in an enclosing expression.
template <typename Fn>
void for_each_assignment(const std::vector<NodeId>& vars, const std::map<NodeId, int>& domains,
                         Assignment& a, Fn&& fn) {
    if (vars.empty()) {
        fn(a);
        return;
    }
    std::vector<int> cards;
    std::vector<std::optional<int>> saved;
    for (const NodeId& v : vars) {
        cards.push_back(domains.at(v));
        auto it = a.find(v);
        saved.push_back(it == a.end() ? std::optional<int>{} : std::optional<int>{it->second});
    }
    auto restore = [&] {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (saved[i])
                a[vars[i]] = *saved[i];
            else
                a.erase(vars[i]);
    };
    std::vector<int> odo(vars.size(), 0);
    while (true) {
        for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = odo[i];
        fn(a);
        std::size_t i = vars.size();
        while (i > 0) {
            --i;
            if (++odo[i] < cards[i]) break;
            odo[i] = 0;
            if (i == 0) {
                restore();
                return;
            }
        }
    }
}

template <typename Fn>
void for_each_assignment(const VarSet& vars, const std::map<NodeId, int>& domains, Fn&& fn) {
    Assignment a;
    std::vector<NodeId> vs(vars.begin(), vars.end());
    for_each_assignment(vs, domains, a, std::forward<Fn>(fn));
}

// Conditional probability table of one node given its (sorted) parents.
struct Cpt {
    std::vector<NodeId> parents;
    std::vector<int> parent_cards;
    int card = 0;
    std::vector<double> values;  // column-major: config index * card + value

    std::size_t config_index(const Assignment& a) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < parents.size(); ++i) {
            auto it = a.find(parents[i]);
            if (it == a.end())
                throw std::invalid_argument("assignment missing parent '" + parents[i].name + "'");
            idx = idx * static_cast<std::size_t>(parent_cards[i]) +
                  static_cast<std::size_t>(it->second);
        }
        return idx;
    }

    double prob(int value, const Assignment& a) const {
        return values[config_index(a) * static_cast<std::size_t>(card) +
                      static_cast<std::size_t>(value)];
    }
};

// A full CPT parameterization of a latent DAG over finite domains. All
// entries are strictly positive (at least epsilon) so every conditional and
// quotient downstream is well defined.
struct DiscreteModel {
    LatentDag graph;
    std::map<NodeId, int> domains;
    std::map<NodeId, Cpt> cpts;
    double epsilon = 1e-3;

    static DiscreteModel make(LatentDag graph, std::map<NodeId, int> domains,
                              std::map<NodeId, Cpt> cpts, double epsilon = 1e-3) {
        DiscreteModel m{std::move(graph), std::move(domains), std::move(cpts), epsilon};
        for (const NodeId& n : m.graph.observed() | m.graph.hidden()) {
            auto it = m.cpts.find(n);
            if (it == m.cpts.end())
                throw std::invalid_argument("missing CPT for '" + n.name + "'");
            const Cpt& c = it->second;
            if (c.card != m.domains.at(n))
                throw std::invalid_argument("CPT cardinality mismatch for '" + n.name + "'");
            std::size_t configs = c.values.size() / static_cast<std::size_t>(c.card);
            for (std::size_t k = 0; k < configs; ++k) {
                double sum = 0;
                for (int v = 0; v < c.card; ++v) {
                    double p = c.values[k * c.card + v];
                    if (p < epsilon - 1e-15)
                        throw std::invalid_argument("CPT entry below positivity floor for '" +
                                                    n.name + "'");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-12)
                    throw std::invalid_argument("CPT column of '" + n.name +
                                                "' does not sum to 1");
            }
        }
        return m;
    }
};

struct Distribution : Table {
    static Distribution make(Table t) {
        double mass = 0;
        for (double p : t.values) {
            if (p < -1e-15) throw std::invalid_argument("negative probability entry");
            mass += p;
        }
        if (std::abs(mass - 1.0) > 1e-12)
            throw std::invalid_argument("distribution mass " + std::to_string(mass) +
                                        " differs from 1");
        Distribution d;
        static_cast<Table&>(d) = std::move(t);
        return d;
    }
};

namespace detail {

// 53-bit uniform in [0,1).
inline double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Draws a probability column from a flat Dirichlet, then floors entries to
// epsilon, rescaling the rest so the column still sums to one.
inline std::vector<double> dirichlet_column(std::mt19937_64& rng, int card, double epsilon) {
    std::vector<double> raw(static_cast<std::size_t>(card));
    double sum = 0;
    for (double& x : raw) {
        x = -std::log1p(-u01(rng));
        sum += x;
    }
    for (double& x : raw) x /= sum;
    std::vector<bool> pinned(raw.size(), false);
    while (true) {
        double pinned_mass = 0, rest = 0;
        std::size_t npin = 0;
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (pinned[i]) {
                pinned_mass += epsilon;
                ++npin;
            } else {
                rest += raw[i];
            }
        bool changed = false;
        double scale = (1.0 - pinned_mass) / rest;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (pinned[i]) continue;
            if (raw[i] * scale < epsilon) {
                pinned[i] = true;
                changed = true;
            }
        }
        if (!changed) {
            std::vector<double> out(raw.size());
            for (std::size_t i = 0; i < raw.size(); ++i)
                out[i] = pinned[i] ? epsilon : raw[i] * scale;
            return out;
        }
        (void)npin;
    }
}

}  // namespace detail

// Deterministic in `seed`; every node needs a domain of size at least two.
inline DiscreteModel random_model(const LatentDag& g, const std::map<NodeId, int>& domains,
                                  std::uint64_t seed, double epsilon = 1e-3) {
    for (const NodeId& n : g.observed() | g.hidden()) {
        auto it = domains.find(n);
        if (it == domains.end())
            throw std::invalid_argument("no domain size for '" + n.name + "'");
        if (it->second < 2)
            throw std::invalid_argument("domain of '" + n.name + "' must have size >= 2");
    }
    std::mt19937_64 rng(seed);
    std::map<NodeId, Cpt> cpts;
    for (const NodeId& n : g.observed() | g.hidden()) {
        Cpt c;
        c.card = domains.at(n);
        const VarSet& ps = g.parents(n);
        c.parents.assign(ps.begin(), ps.end());
        std::size_t configs = 1;
        for (const NodeId& p : c.parents) {
            c.parent_cards.push_back(domains.at(p));
            configs *= static_cast<std::size_t>(domains.at(p));
        }
        c.values.reserve(configs * static_cast<std::size_t>(c.card));
        for (std::size_t k = 0; k < configs; ++k) {
            std::vector<double> col = detail::dirichlet_column(rng, c.card, epsilon);
            c.values.insert(c.values.end(), col.begin(), col.end());
        }
        cpts[n] = std::move(c);
    }
    return DiscreteModel::make(g, domains, std::move(cpts), epsilon);
}

inline std::map<NodeId, int> uniform_domains(const LatentDag& g, int observed_card,
                                             int hidden_card = 2) {
    std::map<NodeId, int> d;
    for (const NodeId& n : g.observed()) d[n] = observed_card;
    for (const NodeId& n : g.hidden()) d[n] = hidden_card;
    return d;
}

// Exact observed joint, summing the full product of CPTs over every hidden
// configuration.
inline Distribution observed_joint(const DiscreteModel& m,
                                   std::size_t cap = std::size_t{1} << 24) {
    std::size_t total = 1;
    for (const auto& [n, card] : m.domains) {
        total *= static_cast<std::size_t>(card);
        if (total > cap)
            throw CapExceededError("model state space exceeds the cap of " + std::to_string(cap));
    }
    Table t = Table::zeros(m.graph.observed(), m.domains, cap);
    std::vector<NodeId> all;
    for (const NodeId& n : m.graph.observed() | m.graph.hidden()) all.push_back(n);
    Assignment a;
    for_each_assignment(all, m.domains, a, [&](const Assignment& full) {
        double p = 1;
        for (const NodeId& n : all) p *= m.cpts.at(n).prob(full.at(n), full);
        t.at(full) += p;
    });
    return Distribution::make(std::move(t));
}

// Q[S] straight from the latent parameters: a table over the effective-parent
// closure of S, each entry the sum over the hidden ancestors of S of the
// product of the member and hidden-ancestor CPTs.
inline Table q_direct(const DiscreteModel& m, const VarSet& s,
                      std::size_t cap = std::size_t{1} << 24) {
    if (!subset_of(s, m.graph.observed()))
        throw std::invalid_argument("q_direct: scope must be observed");
    VarSet args = effective_parents(m.graph, s);
    VarSet us = hidden_ancestors(m.graph, s);
    std::size_t total = 1;
    for (const NodeId& n : args | us) {
        total *= static_cast<std::size_t>(m.domains.at(n));
        if (total > cap)
            throw CapExceededError("state space of Q" + braced(s) + " exceeds the cap");
    }
    Table t = Table::zeros(args, m.domains, cap);
    std::vector<NodeId> uvars(us.begin(), us.end());
    for_each_assignment(args, m.domains, [&](Assignment& a) {
        double sum = 0;
        for_each_assignment(uvars, m.domains, a, [&](const Assignment& full) {
            double p = 1;
            for (const NodeId& v : s) p *= m.cpts.at(v).prob(full.at(v), full);
            for (const NodeId& u : us) p *= m.cpts.at(u).prob(full.at(u), full);
            sum += p;
        });
        t.at(a) = sum;
    });
    return t;
}

// ---------------------------------------------------------------------------
// Expression evaluation against an observed joint.

class QEvaluator {
  public:
    explicit QEvaluator(const Distribution& joint) : joint_(joint) {
        for (std::size_t i = 0; i < joint.vars.size(); ++i)
            domains_[joint.vars[i]] = joint.cards[i];
    }

    double eval(const QExpr& e, Assignment& a) {
        switch (e.kind()) {
            case QExpr::Kind::one:
                return 1.0;
            case QExpr::Kind::factor: {
                VarSet given(e.given().begin(), e.given().end());
                VarSet both = given | VarSet{e.child()};
                double num = margin(both).at(a);
                double den = given.empty() ? 1.0 : margin(given).at(a);
                if (den < 1e-15)
                    throw std::runtime_error("positivity violation: conditioning event P" +
                                             braced(given, true) + " has vanishing mass");
                return num / den;
            }
            case QExpr::Kind::product: {
                double p = 1;
                for (const QExpr& t : e.terms()) p *= eval(t, a);
                return p;
            }
            case QExpr::Kind::sum: {
                double s = 0;
                for_each_assignment(e.bound(), domains_, a,
                                    [&](Assignment& inner) { s += eval(e.body(), inner); });
                return s;
            }
            case QExpr::Kind::quotient: {
                double den = eval(e.den(), a);
                if (den < 1e-15)
                    throw std::runtime_error("positivity violation: quotient denominator is 0");
                return eval(e.num(), a) / den;
            }
        }
        return 0;
    }

    const std::map<NodeId, int>& domains() const { return domains_; }

    const Table& margin(const VarSet& vars) {
        auto it = margins_.find(vars);
        if (it != margins_.end()) return it->second;
        Table t = Table::zeros(vars, domains_, joint_.values.size());
        Assignment a;
        for_each_assignment(joint_.vars, domains_, a,
                            [&](const Assignment& full) { t.at(full) += joint_.at(full); });
        return margins_.emplace(vars, std::move(t)).first->second;
    }

  private:
    const Distribution& joint_;
    std::map<NodeId, int> domains_;
    std::map<VarSet, Table> margins_;
};

inline double eval_qexpr(const QExpr& e, const Distribution& joint, Assignment assignment) {
    QEvaluator ev(joint);
    return ev.eval(e, assignment);
}

// ---------------------------------------------------------------------------
// Constraint verification.

struct VerifyReport {
    double max_deviation = 0;
    bool holds = true;
};

// Functional constraints: the expression, evaluated at every assignment of
// its free variables, must be constant within each class of assignments that
// agree on the claimed arguments. Conditional independences are checked
// exactly on the joint.
inline VerifyReport verify_constraint(const Constraint& c, const Distribution& joint,
                                      double tol = 1e-9) {
    QEvaluator ev(joint);
    double dev = 0;
    if (c.kind == Constraint::Kind::functional) {
        VarSet free = free_args(c.q->expr);
        VarSet group = free & c.q->claimed_args;
        VarSet rest = free - group;
        for_each_assignment(group, ev.domains(), [&](Assignment& a) {
            double lo = 0, hi = 0;
            bool first = true;
            std::vector<NodeId> rv(rest.begin(), rest.end());
            for_each_assignment(rv, ev.domains(), a, [&](Assignment& full) {
                double v = ev.eval(c.q->expr, full);
                if (first) {
                    lo = hi = v;
                    first = false;
                } else {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            });
            dev = std::max(dev, hi - lo);
        });
    } else {
        VarSet xg = VarSet{*c.x} | c.given;
        VarSet all = xg | c.others;
        const Table& mall = ev.margin(all);
        const Table& mrest = ev.margin(c.others | c.given);
        std::map<std::pair<std::size_t, int>, std::pair<double, double>> range;
        Assignment a;
        for_each_assignment(mall.vars, ev.domains(), a, [&](const Assignment& full) {
            double den = mrest.at(full);
            if (den < 1e-15)
                throw std::runtime_error("positivity violation in CI check");
            double p = mall.at(full) / den;
            Assignment key;
            for (const NodeId& n : c.given) key[n] = full.at(n);
            std::size_t gidx = ev.margin(c.given).index(key);
            auto [it, fresh] = range.try_emplace({gidx, full.at(*c.x)}, std::pair{p, p});
            if (!fresh) {
                it->second.first = std::min(it->second.first, p);
                it->second.second = std::max(it->second.second, p);
            }
        });
        for (const auto& [k, mm] : range) dev = std::max(dev, mm.second - mm.first);
    }
    return {dev, dev <= tol};
}

inline VerifyReport verify_constraint(const Constraint& c, const DiscreteModel& m,
                                      double tol = 1e-9) {
    Distribution joint = observed_joint(m);
    return verify_constraint(c, joint, tol);
}

// ---------------------------------------------------------------------------
// Numeric subsumption annotation.

// Marks c1 as subsumed by c2 when c2 carries at least as much scope and
// independence content and the two expressions agree numerically, after
// summing c2 down to c1's scope, on every assignment of a batch of seeded
// random models. Purely additive: nothing is removed.
inline void subsumption_annotate(std::vector<Constraint>& cs, const LatentDag& g_in,
                                 const FinderConfig& cfg) {
    if (cfg.dedup != FinderConfig::Dedup::numeric) return;
    LatentDag g = prune_hidden_nonancestors(g_in);
    std::vector<Distribution> joints;
    for (std::size_t t = 0; t < cfg.dedup_trials; ++t)
        joints.push_back(
            observed_joint(random_model(g, uniform_domains(g, 2), cfg.dedup_seed + t)));

    auto agree = [&](const QExpr& e1, const QExpr& e2) {
        VarSet u = free_args(e1) | free_args(e2);
        for (const Distribution& joint : joints) {
            QEvaluator ev(joint);
            bool ok = true;
            for_each_assignment(u, ev.domains(), [&](Assignment& a) {
                if (!ok) return;
                if (std::abs(ev.eval(e1, a) - ev.eval(e2, a)) > 1e-9) ok = false;
            });
            if (!ok) return false;
        }
        return true;
    };

    for (std::size_t i = 0; i < cs.size(); ++i) {
        Constraint& c1 = cs[i];
        if (c1.kind != Constraint::Kind::functional) continue;
        for (std::size_t j = 0; j < cs.size() && !c1.subsumed_by; ++j) {
            if (j == i) continue;
            const Constraint& c2 = cs[j];
            if (c2.kind != Constraint::Kind::functional) continue;
            if (!subset_of(c1.q->scope, c2.q->scope)) continue;
            if (!subset_of(c1.extraneous, c2.extraneous)) continue;
            VarSet extra = c2.q->scope - c1.q->scope;
            if (!subset_of(extra, free_args(c2.q->expr))) continue;
            QBuilder qb{c2.q->order};
            QExpr e2 = extra.empty() ? c2.q->expr : qb.sum(extra, c2.q->expr);
            if (agree(c1.q->expr, e2)) c1.subsumed_by = j;
        }
    }
}

}  // namespace vermakit
