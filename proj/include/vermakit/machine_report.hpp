#pragma once

// Machine-readable constraint report. One JSON document per run: metadata
// (graph hash, orders, config), then one record per constraint. Field names
// and their order are part of the output contract and are documented in the
// project README.

#include <json.hpp>

#include "constraints.hpp"
#include "graph_io.hpp"

namespace vermakit {

using OrderedJson = nlohmann::ordered_json;

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string graph_hash(const ParsedGraph& g) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(format_graph(g))));
    return buf;
}

namespace detail {

inline OrderedJson names_json(const VarSet& s) {
    OrderedJson a = OrderedJson::array();
    for (const NodeId& n : s) a.push_back(n.name);
    return a;
}

inline OrderedJson names_json(const std::vector<NodeId>& s) {
    OrderedJson a = OrderedJson::array();
    for (const NodeId& n : s) a.push_back(n.name);
    return a;
}

}  // namespace detail

inline OrderedJson constraint_to_json(const Constraint& c) {
    OrderedJson j;
    j["kind"] = c.kind == Constraint::Kind::functional ? "functional"
                                                       : "conditional_independence";
    if (c.kind == Constraint::Kind::functional) {
        j["rendered_expression"] = render(c.q->expr);
        j["scope"] = detail::names_json(c.q->scope);
        j["claimed_args"] = detail::names_json(c.q->claimed_args);
        j["extraneous"] = detail::names_json(c.extraneous);
    } else {
        OrderedJson ci;
        ci["x"] = c.x->name;
        ci["others"] = detail::names_json(c.others);
        ci["given"] = detail::names_json(c.given);
        j["ci"] = ci;
    }
    j["order"] = detail::names_json(c.order);
    OrderedJson steps = OrderedJson::array();
    for (const DerivationStep& s : c.derivation) {
        OrderedJson d;
        d["step"] = s.step;
        d["equation"] = s.rule;
        d["detail"] = s.detail;
        steps.push_back(d);
    }
    j["derivation"] = steps;
    if (c.subsumed_by)
        j["subsumed_by"] = *c.subsumed_by;
    else
        j["subsumed_by"] = nullptr;
    return j;
}

inline OrderedJson constraints_json(const std::vector<Constraint>& cs) {
    OrderedJson arr = OrderedJson::array();
    for (const Constraint& c : cs) arr.push_back(constraint_to_json(c));
    return arr;
}

inline std::string machine_report(const ParsedGraph& g, const FinderConfig& cfg,
                                  const std::vector<std::vector<NodeId>>& orders,
                                  const std::vector<Constraint>& cs) {
    OrderedJson meta;
    meta["graph_hash"] = graph_hash(g);
    meta["order_mode"] =
        cfg.order_mode == FinderConfig::OrderMode::canonical ? "canonical" : "all";
    OrderedJson os = OrderedJson::array();
    for (const auto& o : orders) os.push_back(detail::names_json(o));
    meta["orders"] = os;
    OrderedJson conf;
    conf["max_component_size"] = cfg.max_component_size;
    conf["dedup"] = cfg.dedup == FinderConfig::Dedup::numeric ? "numeric" : "none";
    if (cfg.dedup == FinderConfig::Dedup::numeric) {
        conf["dedup_seed"] = cfg.dedup_seed;
        conf["dedup_trials"] = cfg.dedup_trials;
    }
    if (cfg.order_mode == FinderConfig::OrderMode::all_orders)
        conf["order_cap"] = cfg.order_cap;
    meta["config"] = conf;

    OrderedJson doc;
    doc["metadata"] = meta;
    doc["constraints"] = constraints_json(cs);
    return doc.dump(2) + "\n";
}

}  // namespace vermakit
