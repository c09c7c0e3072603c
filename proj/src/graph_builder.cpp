#include "medtext/graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "medtext/error.hpp"

namespace medtext {

using nlohmann::json;

VertexBuild build_vertices(const Document& doc, const std::vector<EntityMention>& mentions,
                           const KnowledgeGraph& kg, const EmbeddingTable& table) {
    VertexBuild build;
    std::map<std::string, std::size_t> word_index;
    std::map<std::string, std::size_t> entity_index;
    std::vector<std::vector<double>> rows;

    auto word_vertex = [&](const std::string& token) {
        auto it = word_index.find(token);
        if (it != word_index.end()) return it->second;
        const std::size_t idx = build.vertices.size();
        build.vertices.push_back({VertexKind::Word, token, idx});
        rows.push_back(table.embed_word(token));
        word_index.emplace(token, idx);
        return idx;
    };
    auto entity_vertex = [&](const std::string& id) {
        auto it = entity_index.find(id);
        if (it != entity_index.end()) return it->second;
        const std::size_t idx = build.vertices.size();
        build.vertices.push_back({VertexKind::Entity, id, idx});
        rows.push_back(table.embed_entity(kg.entity(id)));
        entity_index.emplace(id, idx);
        return idx;
    };

    std::map<std::size_t, const EntityMention*> mention_at;
    for (const EntityMention& m : mentions) mention_at.emplace(m.begin, &m);

    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
        auto it = mention_at.find(t);
        if (it != mention_at.end()) {
            build.occurrence_sequence.push_back(entity_vertex(it->second->entity_id));
        }
        if (!is_stopword(doc.tokens[t])) {
            build.occurrence_sequence.push_back(word_vertex(doc.tokens[t]));
        }
    }

    if (build.vertices.empty()) {
        throw Error(ErrorKind::EmptyGraph, "document " + doc.id + " yields no vertices");
    }

    build.x0 = Matrix(rows.size(), static_cast<std::size_t>(table.dim()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) build.x0(i, j) = rows[i][j];
    }
    return build;
}

Matrix view1_cooccurrence(const std::vector<std::size_t>& sequence, std::size_t n_vertices,
                          int window) {
    if (window < 2) throw Error(ErrorKind::InvalidArgument, "window must be >= 2");
    Matrix counts(n_vertices, n_vertices);
    if (sequence.empty()) return counts;
    const std::size_t w = static_cast<std::size_t>(window);
    const std::size_t n_windows = sequence.size() <= w ? 1 : sequence.size() - w + 1;
    std::set<std::size_t> present;
    for (std::size_t start = 0; start < n_windows; ++start) {
        const std::size_t stop = std::min(start + w, sequence.size());
        present.clear();
        for (std::size_t k = start; k < stop; ++k) present.insert(sequence[k]);
        for (auto i = present.begin(); i != present.end(); ++i) {
            for (auto j = std::next(i); j != present.end(); ++j) {
                counts(*i, *j) += 1.0;
                counts(*j, *i) += 1.0;
            }
        }
    }
    return counts;
}

Matrix view2_kg_distance(const std::vector<Vertex>& vertices, const KnowledgeGraph& kg,
                         int max_depth) {
    Matrix view(vertices.size(), vertices.size());
    std::vector<std::size_t> entity_rows;
    std::vector<std::string> entity_ids;
    for (const Vertex& v : vertices) {
        if (v.kind == VertexKind::Entity) {
            entity_rows.push_back(v.feature_index);
            entity_ids.push_back(v.key);
        }
    }
    if (entity_ids.size() < 2) return view;
    const Matrix weights = shortest_path_weights(entity_ids, kg, max_depth);
    for (std::size_t i = 0; i < entity_rows.size(); ++i) {
        for (std::size_t j = 0; j < entity_rows.size(); ++j) {
            view(entity_rows[i], entity_rows[j]) = weights(i, j);
        }
    }
    return view;
}

Matrix view3_description_sim(const std::vector<Vertex>& vertices, const KnowledgeGraph& kg) {
    Matrix view(vertices.size(), vertices.size());
    std::vector<std::size_t> entity_rows;
    for (const Vertex& v : vertices) {
        if (v.kind == VertexKind::Entity) entity_rows.push_back(v.feature_index);
    }
    for (std::size_t i = 0; i < entity_rows.size(); ++i) {
        const Entity& a = kg.entity(vertices[entity_rows[i]].key);
        for (std::size_t j = i + 1; j < entity_rows.size(); ++j) {
            const Entity& b = kg.entity(vertices[entity_rows[j]].key);
            const double sim = description_overlap(a, b);
            view(entity_rows[i], entity_rows[j]) = sim;
            view(entity_rows[j], entity_rows[i]) = sim;
        }
    }
    return view;
}

Matrix view4_cosine(const Matrix& x0) {
    const std::size_t n = x0.rows();
    Matrix view(n, n);
    std::vector<double> norms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < x0.cols(); ++k) acc += x0(i, k) * x0(i, k);
        norms[i] = std::sqrt(acc);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (norms[i] == 0.0) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norms[j] == 0.0) continue;
            double dot = 0.0;
            for (std::size_t k = 0; k < x0.cols(); ++k) dot += x0(i, k) * x0(j, k);
            const double cosine = dot / (norms[i] * norms[j]);
            const double clamped = cosine > 0.0 ? cosine : 0.0;
            view(i, j) = clamped;
            view(j, i) = clamped;
        }
    }
    return view;
}

Matrix normalize_view(Matrix view) {
    double max_entry = 0.0;
    for (double v : view.data()) max_entry = std::max(max_entry, v);
    if (max_entry > 0.0) {
        for (double& v : view.data()) v /= max_entry;
    }
    return view;
}

Matrix combine_and_mask(const std::array<Matrix, 4>& views, const std::array<double, 4>& alphas,
                        double gamma) {
    bool any_positive = false;
    for (double a : alphas) {
        if (a < 0.0) throw Error(ErrorKind::InvalidArgument, "alphas must be non-negative");
        if (a > 0.0) any_positive = true;
    }
    if (!any_positive) throw Error(ErrorKind::InvalidArgument, "all alphas are zero");
    for (int i = 1; i < 4; ++i) {
        if (!views[0].same_shape(views[static_cast<std::size_t>(i)])) {
            throw Error(ErrorKind::ShapeMismatch, "views have differing shapes");
        }
    }
    Matrix combined(views[0].rows(), views[0].cols());
    for (std::size_t k = 0; k < combined.data().size(); ++k) {
        double sum = 0.0;
        for (std::size_t v = 0; v < 4; ++v) sum += alphas[v] * views[v].data()[k];
        combined.data()[k] = sum > gamma ? sum : 0.0;
    }
    return combined;
}

Matrix renormalize(const Matrix& a_combined) {
    if (a_combined.rows() != a_combined.cols()) {
        throw Error(ErrorKind::ShapeMismatch, "adjacency must be square");
    }
    const std::size_t n = a_combined.rows();
    std::vector<double> inv_sqrt_degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 1.0; // self-loop
        for (std::size_t j = 0; j < n; ++j) degree += a_combined(i, j);
        inv_sqrt_degree[i] = 1.0 / std::sqrt(degree);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double hat = a_combined(i, j) + (i == j ? 1.0 : 0.0);
            if (hat != 0.0) out(i, j) = inv_sqrt_degree[i] * hat * inv_sqrt_degree[j];
        }
    }
    return out;
}

DocGraph build_doc_graph(const Document& doc, const KnowledgeGraph& kg,
                         const EmbeddingTable& table, const GraphConfig& config) {
    const std::vector<EntityMention> mentions = link_entities(doc, kg);
    VertexBuild build = build_vertices(doc, mentions, kg, table);

    DocGraph graph;
    graph.doc_id = doc.id;
    graph.vertices = std::move(build.vertices);
    graph.x0 = std::move(build.x0);
    graph.alphas = config.alphas;
    graph.gamma = config.gamma;

    graph.views[0] = normalize_view(
        view1_cooccurrence(build.occurrence_sequence, graph.vertices.size(), config.window));
    graph.views[1] = normalize_view(view2_kg_distance(graph.vertices, kg, config.max_depth));
    graph.views[2] = normalize_view(view3_description_sim(graph.vertices, kg));
    graph.views[3] = normalize_view(view4_cosine(graph.x0));

    const bool all_zero =
        std::all_of(config.alphas.begin(), config.alphas.end(), [](double a) { return a == 0.0; });
    if (all_zero) {
        // View-free ablation: no edges survive, only the self-loops remain.
        graph.a_combined = Matrix(graph.vertices.size(), graph.vertices.size());
    } else {
        graph.a_combined = combine_and_mask(graph.views, config.alphas, config.gamma);
    }
    graph.a_norm = renormalize(graph.a_combined);
    return graph;
}

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    if (!rows.is_array()) throw Error(ErrorKind::Parse, "matrix json must be an array");
    const std::size_t n_rows = rows.size();
    if (n_rows == 0) return {};
    const std::size_t n_cols = rows[0].size();
    Matrix m(n_rows, n_cols);
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (rows[i].size() != n_cols) {
            throw Error(ErrorKind::Parse, "matrix json rows have differing lengths");
        }
        for (std::size_t j = 0; j < n_cols; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

} // namespace

json graph_config_to_json(const GraphConfig& config) {
    json root;
    root["window"] = config.window;
    root["alphas"] = config.alphas;
    root["gamma"] = config.gamma;
    root["max_depth"] = config.max_depth;
    root["max_tokens"] = config.max_tokens;
    return root;
}

GraphConfig graph_config_from_json(const json& root) {
    try {
        GraphConfig config;
        config.window = root.at("window").get<int>();
        const auto alphas = root.at("alphas").get<std::vector<double>>();
        if (alphas.size() != 4) throw Error(ErrorKind::Parse, "config alphas must have 4 entries");
        std::copy(alphas.begin(), alphas.end(), config.alphas.begin());
        config.gamma = root.at("gamma").get<double>();
        config.max_depth = root.at("max_depth").get<int>();
        config.max_tokens = root.at("max_tokens").get<std::size_t>();
        return config;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("graph config json: ") + e.what());
    }
}

json doc_graph_to_json(const DocGraph& graph, const GraphConfig& config) {
    json root;
    root["version"] = 1;
    root["doc_id"] = graph.doc_id;
    json vertices = json::array();
    for (const Vertex& v : graph.vertices) {
        vertices.push_back(
            {{"kind", v.kind == VertexKind::Word ? "word" : "entity"}, {"key", v.key}});
    }
    root["vertices"] = std::move(vertices);
    root["x0"] = matrix_to_json(graph.x0);
    root["a_norm"] = matrix_to_json(graph.a_norm);
    root["meta"] = graph_config_to_json(config);
    return root;
}

DocGraph doc_graph_from_json(const json& root) {
    try {
        if (root.value("version", 0) != 1) {
            throw Error(ErrorKind::Parse, "unsupported graph file version");
        }
        DocGraph graph;
        graph.doc_id = root.at("doc_id").get<std::string>();
        std::size_t index = 0;
        for (const json& item : root.at("vertices")) {
            Vertex v;
            const std::string kind = item.at("kind").get<std::string>();
            if (kind == "word") {
                v.kind = VertexKind::Word;
            } else if (kind == "entity") {
                v.kind = VertexKind::Entity;
            } else {
                throw Error(ErrorKind::Parse, "unknown vertex kind: " + kind);
            }
            v.key = item.at("key").get<std::string>();
            v.feature_index = index++;
            graph.vertices.push_back(std::move(v));
        }
        graph.x0 = matrix_from_json(root.at("x0"));
        graph.a_norm = matrix_from_json(root.at("a_norm"));
        const GraphConfig config = graph_config_from_json(root.at("meta"));
        graph.alphas = config.alphas;
        graph.gamma = config.gamma;
        if (graph.x0.rows() != graph.vertices.size() ||
            graph.a_norm.rows() != graph.vertices.size() ||
            graph.a_norm.cols() != graph.vertices.size()) {
            throw Error(ErrorKind::Parse, "graph file shapes are inconsistent");
        }
        return graph;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("graph json: ") + e.what());
    }
}

} // namespace medtext
