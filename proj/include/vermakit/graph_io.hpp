#pragma once

// Line-oriented graph file format (UTF-8, '#' starts a comment):
//
//   observed <name> [<name> ...]
//   hidden <name> [<name> ...]          latent-DAG files only
//   edge <name> -> <name>
//   biedge <name> <-> <name>            ADMG files only
//
// A file containing any `biedge` parses to an Admg, otherwise to a LatentDag.
// Mixing `hidden` and `biedge` is an error.

#include <cctype>
#include <sstream>
#include <variant>

#include "graph.hpp"

namespace vermakit {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& msg)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

using ParsedGraph = std::variant<LatentDag, Admg>;

namespace detail {

inline bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

inline std::vector<std::string> tokens_of(const std::string& line) {
    std::string stripped = line.substr(0, line.find('#'));
    std::istringstream is(stripped);
    std::vector<std::string> toks;
    std::string t;
    while (is >> t) toks.push_back(t);
    return toks;
}

}  // namespace detail

inline ParsedGraph parse_graph(const std::string& text) {
    VarSet observed, hidden;
    std::vector<Edge> edges, biedges;
    std::set<std::string> lower_names;  // names must stay distinct case-insensitively
    int hidden_line = 0, biedge_line = 0;

    auto declare = [&](VarSet& target, const std::string& name, int line) {
        if (!detail::valid_identifier(name))
            throw ParseError(line, "invalid identifier '" + name + "'");
        NodeId id{name};
        if (contains(observed, id) || contains(hidden, id))
            throw ParseError(line, "duplicate declaration of '" + name + "'");
        if (!lower_names.insert(value_name(id)).second)
            throw ParseError(line, "name '" + name + "' collides with another (case-insensitive)");
        target.insert(id);
    };
    auto declared = [&](const std::string& name) {
        return contains(observed, NodeId{name}) || contains(hidden, NodeId{name});
    };

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::vector<std::string> toks = detail::tokens_of(raw);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        if (kw == "observed" || kw == "hidden") {
            if (toks.size() < 2) throw ParseError(lineno, "'" + kw + "' needs at least one name");
            if (kw == "hidden") hidden_line = lineno;
            for (std::size_t i = 1; i < toks.size(); ++i)
                declare(kw == "observed" ? observed : hidden, toks[i], lineno);
        } else if (kw == "edge") {
            if (toks.size() != 4 || toks[2] != "->")
                throw ParseError(lineno, "expected 'edge <name> -> <name>'");
            if (!declared(toks[1])) throw ParseError(lineno, "undeclared node '" + toks[1] + "'");
            if (!declared(toks[3])) throw ParseError(lineno, "undeclared node '" + toks[3] + "'");
            if (toks[1] == toks[3]) throw ParseError(lineno, "self-loop on '" + toks[1] + "'");
            Edge e{NodeId{toks[1]}, NodeId{toks[3]}};
            if (std::find(edges.begin(), edges.end(), e) != edges.end())
                throw ParseError(lineno, "duplicate edge " + toks[1] + " -> " + toks[3]);
            edges.push_back(e);
        } else if (kw == "biedge") {
            if (toks.size() != 4 || toks[2] != "<->")
                throw ParseError(lineno, "expected 'biedge <name> <-> <name>'");
            if (!declared(toks[1])) throw ParseError(lineno, "undeclared node '" + toks[1] + "'");
            if (!declared(toks[3])) throw ParseError(lineno, "undeclared node '" + toks[3] + "'");
            if (toks[1] == toks[3])
                throw ParseError(lineno, "bidirected self-loop on '" + toks[1] + "'");
            biedge_line = lineno;
            NodeId a{toks[1]}, b{toks[3]};
            if (b < a) std::swap(a, b);
            Edge e{a, b};
            if (std::find(biedges.begin(), biedges.end(), e) != biedges.end())
                throw ParseError(lineno, "duplicate bidirected edge " + a.name + " <-> " + b.name);
            biedges.push_back(e);
        } else {
            throw ParseError(lineno, "unknown directive '" + kw + "'");
        }
    }

    if (hidden_line && biedge_line)
        throw ParseError(std::max(hidden_line, biedge_line),
                         "a file may not mix 'hidden' and 'biedge'");
    try {
        if (biedge_line) return Admg::make(observed, edges, biedges);
        return LatentDag::make(observed, hidden, edges);
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, e.what());
    }
}

inline std::string format_graph(const LatentDag& g) {
    std::string out;
    if (!g.observed().empty()) out += "observed " + joined(g.observed(), " ") + "\n";
    if (!g.hidden().empty()) out += "hidden " + joined(g.hidden(), " ") + "\n";
    for (const auto& [a, b] : g.edges()) out += "edge " + a.name + " -> " + b.name + "\n";
    return out;
}

inline std::string format_graph(const Admg& g) {
    std::string out;
    if (!g.observed().empty()) out += "observed " + joined(g.observed(), " ") + "\n";
    for (const auto& [a, b] : g.directed()) out += "edge " + a.name + " -> " + b.name + "\n";
    for (const auto& [a, b] : g.bidirected())
        out += "biedge " + a.name + " <-> " + b.name + "\n";
    return out;
}

inline std::string format_graph(const ParsedGraph& g) {
    return std::visit([](const auto& x) { return format_graph(x); }, g);
}

}  // namespace vermakit
