#pragma once

#include <vermakit/oracle.hpp>

namespace testutil {

inline vermakit::VarSet vs(std::initializer_list<const char*> names) {
    vermakit::VarSet s;
    for (const char* n : names) s.insert(vermakit::NodeId{n});
    return s;
}

inline std::vector<vermakit::NodeId> seq(std::initializer_list<const char*> names) {
    std::vector<vermakit::NodeId> v;
    for (const char* n : names) v.push_back(vermakit::NodeId{n});
    return v;
}

inline vermakit::Assignment assign(std::initializer_list<std::pair<const char*, int>> kv) {
    vermakit::Assignment a;
    for (const auto& [k, v] : kv) a[vermakit::NodeId{k}] = v;
    return a;
}

// Maximum absolute difference between two tables over the union of their
// argument sets, evaluated at every full observed assignment.
inline double table_gap(const vermakit::Table& a, const vermakit::Table& b,
                        const std::map<vermakit::NodeId, int>& domains) {
    vermakit::VarSet u(a.vars.begin(), a.vars.end());
    u.insert(b.vars.begin(), b.vars.end());
    double gap = 0;
    vermakit::for_each_assignment(u, domains, [&](vermakit::Assignment& x) {
        gap = std::max(gap, std::abs(a.at(x) - b.at(x)));
    });
    return gap;
}

}  // namespace testutil
