#pragma once

// The small latent DAGs every suite exercises: a confounded chain with a
// Verma constraint, its indistinguishable-by-CI sibling that has none, a
// graph with a non-root hidden variable, a bow-free chain whose constraint is
// a quotient, and a five-node graph whose constraints partially subsume each
// other.

#include <string>

#include <vermakit/graph_io.hpp>

namespace golden {

// A -> B -> C -> D with a hidden common cause of B and D.
inline const char* kVermaChainText = R"(# confounded chain
observed A B C D
hidden U
edge A -> B
edge B -> C
edge C -> D
edge U -> B
edge U -> D
)";

// Same independencies, no functional constraint: adds A -> D.
inline const char* kVermaChainDirectText = R"(observed A B C D
hidden U
edge A -> B
edge B -> C
edge C -> D
edge U -> B
edge U -> D
edge A -> D
)";

// Non-root hidden variable: V1 -> U3 -> V2.
inline const char* kMidpathHiddenText = R"(observed V1 V2 V3 V4
hidden U1 U2 U3
edge U1 -> V1
edge U1 -> V3
edge V2 -> V3
edge U2 -> V2
edge U3 -> V2
edge V3 -> V4
edge U2 -> V4
edge V1 -> U3
)";

// Chain V1 -> V2 -> V3 -> V4 with V1 confounded with V3 and with V4.
inline const char* kQuotientChainText = R"(observed V1 V2 V3 V4
hidden U1 U2
edge V1 -> V2
edge V2 -> V3
edge V3 -> V4
edge U1 -> V1
edge U1 -> V3
edge U2 -> V1
edge U2 -> V4
)";

// kFig2 extended by V5 with V4 -> V5 and a hidden common cause of V1 and V5.
inline const char* kFiveNodeText = R"(observed V1 V2 V3 V4 V5
hidden U1 U2 U3 U4
edge U1 -> V1
edge U1 -> V3
edge V2 -> V3
edge U2 -> V2
edge U3 -> V2
edge V3 -> V4
edge U2 -> V4
edge V1 -> U3
edge V4 -> V5
edge U4 -> V1
edge U4 -> V5
)";

// Plain chain, no hidden variables.
inline const char* kChainText = R"(observed A B C
edge A -> B
edge B -> C
)";

inline vermakit::LatentDag parse_latent(const char* text) {
    return std::get<vermakit::LatentDag>(vermakit::parse_graph(text));
}

inline vermakit::LatentDag verma_chain() { return parse_latent(kVermaChainText); }
inline vermakit::LatentDag verma_chain_direct() { return parse_latent(kVermaChainDirectText); }
inline vermakit::LatentDag midpath_hidden() { return parse_latent(kMidpathHiddenText); }
inline vermakit::LatentDag quotient_chain() { return parse_latent(kQuotientChainText); }
inline vermakit::LatentDag five_node() { return parse_latent(kFiveNodeText); }
inline vermakit::LatentDag chain() { return parse_latent(kChainText); }

struct Named {
    const char* name;
    const char* text;
};

inline std::vector<Named> all() {
    return {{"verma_chain", kVermaChainText}, {"verma_chain_direct", kVermaChainDirectText}, {"midpath_hidden", kMidpathHiddenText},
            {"quotient_chain", kQuotientChainText},   {"five_node", kFiveNodeText},   {"chain", kChainText}};
}

}  // namespace golden
