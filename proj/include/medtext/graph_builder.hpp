#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "medtext/corpus.hpp"
#include "medtext/embeddings.hpp"
#include "medtext/kg.hpp"
#include "medtext/matrix.hpp"

namespace medtext {

struct GraphConfig {
    int window = 3;
    std::array<double, 4> alphas = {0.25, 0.25, 0.25, 0.25};
    double gamma = 0.5;
    int max_depth = 4;
    std::size_t max_tokens = kDefaultMaxTokens;
};

enum class VertexKind { Word, Entity };

struct Vertex {
    VertexKind kind;
    std::string key;           // token string or entity id
    std::size_t feature_index; // row into X0
};

struct DocGraph {
    std::string doc_id;
    std::vector<Vertex> vertices;
    Matrix x0;                   // n x d initial features
    std::array<Matrix, 4> views; // normalized view adjacencies
    std::array<double, 4> alphas = {0.25, 0.25, 0.25, 0.25};
    double gamma = 0.5;
    Matrix a_combined;
    Matrix a_norm; // self-loops folded in, symmetric degree normalization
};

struct VertexBuild {
    std::vector<Vertex> vertices;
    Matrix x0;
    // Token-position-ordered stream of vertex indices; each mention emits its
    // entity vertex at the span's first token position, words inside mention
    // spans are kept, stopword tokens have no vertex and are skipped.
    std::vector<std::size_t> occurrence_sequence;
};

VertexBuild build_vertices(const Document& doc, const std::vector<EntityMention>& mentions,
                           const KnowledgeGraph& kg, const EmbeddingTable& table);

// V1: co-occurrence counts within a sliding window over the occurrence
// sequence. A sequence shorter than the window is one window.
Matrix view1_cooccurrence(const std::vector<std::size_t>& sequence, std::size_t n_vertices,
                          int window = 3);

// V2: reciprocal shortest-path distances between entity vertices.
Matrix view2_kg_distance(const std::vector<Vertex>& vertices, const KnowledgeGraph& kg,
                         int max_depth);

// V3: description token-set overlap between entity vertices.
Matrix view3_description_sim(const std::vector<Vertex>& vertices, const KnowledgeGraph& kg);

// V4: cosine similarity between initial representations of all vertices,
// negatives clamped to zero.
Matrix view4_cosine(const Matrix& x0);

// Divide by the maximum entry; an all-zero matrix is returned unchanged.
Matrix normalize_view(Matrix view);

// Weighted sum of normalized views; entries <= gamma are dropped, entries
// strictly greater are kept at their value.
Matrix combine_and_mask(const std::array<Matrix, 4>& views, const std::array<double, 4>& alphas,
                        double gamma);

// A_hat = A + I; symmetric normalization D^-1/2 A_hat D^-1/2.
Matrix renormalize(const Matrix& a_combined);

DocGraph build_doc_graph(const Document& doc, const KnowledgeGraph& kg,
                         const EmbeddingTable& table, const GraphConfig& config);

// Versioned per-document JSON: vertices, X0, A_norm, build metadata. Views
// and A_combined are rebuild products and are not serialized.
nlohmann::json doc_graph_to_json(const DocGraph& graph, const GraphConfig& config);
DocGraph doc_graph_from_json(const nlohmann::json& root);

nlohmann::json graph_config_to_json(const GraphConfig& config);
GraphConfig graph_config_from_json(const nlohmann::json& root);

} // namespace medtext
