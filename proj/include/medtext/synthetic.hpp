#pragma once

#include <cstdint>
#include <string>

#include "medtext/corpus.hpp"
#include "medtext/kg.hpp"

namespace medtext {

struct SyntheticBundle {
    Corpus corpus;
    KnowledgeGraph kg;
    std::string embeddings_text; // word2vec text format
    int embedding_dim = 0;
};

// Desk-scale labeled corpus with a planted signal: label-1 documents contain
// aliases of at least two entities from a connected "risk" cluster of the
// knowledge graph, label-0 documents draw from a disjoint cluster, and both
// share a filler vocabulary. The two clusters connect only through a bridge
// entity, so inter-cluster paths are >= 2 hops. Output is byte-identical for
// equal arguments.
SyntheticBundle generate_synthetic(int n_docs, int n_entities, std::uint64_t seed,
                                   int embedding_dim = 32);

} // namespace medtext
