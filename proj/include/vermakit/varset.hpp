#pragma once

#include <algorithm>
#include <compare>
#include <set>
#include <string>
#include <vector>

namespace vermakit {

// A graph node identifier. Comparison is by name; the lexicographic order of
// names is the canonical total order used for all deterministic set output.
struct NodeId {
    std::string name;

    NodeId() = default;
    NodeId(std::string n) : name(std::move(n)) {}
    NodeId(const char* n) : name(n) {}

    auto operator<=>(const NodeId&) const = default;
};

// Canonically ordered set of node identifiers.
using VarSet = std::set<NodeId>;

inline bool contains(const VarSet& s, const NodeId& x) { return s.count(x) > 0; }

inline bool subset_of(const VarSet& a, const VarSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline VarSet operator|(const VarSet& a, const VarSet& b) {
    VarSet r = a;
    r.insert(b.begin(), b.end());
    return r;
}

inline VarSet operator-(const VarSet& a, const VarSet& b) {
    VarSet r;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(r, r.end()));
    return r;
}

inline VarSet operator&(const VarSet& a, const VarSet& b) {
    VarSet r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(r, r.end()));
    return r;
}

inline VarSet to_varset(const std::vector<NodeId>& v) {
    return VarSet(v.begin(), v.end());
}

// Lowercase form of a name, used when an identifier stands for a value
// rather than a variable (e.g. inside probability expressions).
inline std::string value_name(const NodeId& x) {
    std::string s = x.name;
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::string joined(const VarSet& s, const std::string& sep, bool as_value = false) {
    std::string out;
    for (const NodeId& x : s) {
        if (!out.empty()) out += sep;
        out += as_value ? value_name(x) : x.name;
    }
    return out;
}

// Renders a set as "{A,B,C}".
inline std::string braced(const VarSet& s, bool as_value = false) {
    return "{" + joined(s, ",", as_value) + "}";
}

}  // namespace vermakit
