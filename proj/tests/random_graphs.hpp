#pragma once

// Seeded random latent DAGs for property tests. Even seeds draw a sparse
// observed spine with root confounders over pairs of observed nodes (the
// shape that actually produces functional constraints); odd seeds draw a
// fully general DAG where hidden nodes may sit mid-graph with observed
// parents. Both flavors come back pruned.

#include <random>

#include <vermakit/graph.hpp>

namespace testutil {

inline vermakit::LatentDag random_latent_dag(std::uint64_t seed, int max_observed = 6,
                                             int max_hidden = 3) {
    using vermakit::Edge;
    using vermakit::NodeId;
    using vermakit::VarSet;
    std::mt19937_64 rng(seed);
    auto next = [&](int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    int n_obs = next(2, max_observed);
    VarSet observed, hidden;
    std::vector<NodeId> ov;
    for (int i = 0; i < n_obs; ++i) {
        NodeId v{"X" + std::to_string(i)};
        observed.insert(v);
        ov.push_back(v);
    }
    std::vector<Edge> edges;
    if (seed % 2 == 0) {
        for (int i = 0; i + 1 < n_obs; ++i)
            if (rng() % 100 < 70) edges.push_back({ov[i], ov[i + 1]});
        int n_hid = next(1, max_hidden);
        for (int k = 0; k < n_hid; ++k) {
            NodeId u{"H" + std::to_string(k)};
            hidden.insert(u);
            int a = next(0, n_obs - 1), b = next(0, n_obs - 1);
            if (a == b) b = (b + 1) % n_obs;
            edges.push_back({u, ov[a]});
            if (std::find(edges.begin(), edges.end(), Edge{u, ov[b]}) == edges.end())
                edges.push_back({u, ov[b]});
        }
    } else {
        int n_hid = next(0, max_hidden);
        std::vector<NodeId> nodes = ov;
        for (int i = 0; i < n_hid; ++i) {
            NodeId u{"H" + std::to_string(i)};
            hidden.insert(u);
            nodes.push_back(u);
        }
        for (std::size_t i = nodes.size(); i > 1; --i)
            std::swap(nodes[i - 1], nodes[static_cast<std::size_t>(rng() % i)]);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = i + 1; j < nodes.size(); ++j)
                if (rng() % 100 < 30) edges.push_back({nodes[i], nodes[j]});
    }
    return prune_hidden_nonancestors(vermakit::LatentDag::make(observed, hidden, edges));
}

}  // namespace testutil
