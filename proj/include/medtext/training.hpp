#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medtext/corpus.hpp"
#include "medtext/embeddings.hpp"
#include "medtext/graph_builder.hpp"
#include "medtext/metrics.hpp"
#include "medtext/model.hpp"

namespace medtext {

struct TrainConfig {
    int epochs = 30;
    int batch_size = 8;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double pos_weight = 1.0;
    int patience = 5;
    ModelConfig model;

    void validate() const;
};

struct TrainExample {
    std::string doc_id;
    int label = 0;
    Split split = Split::Train;
    Matrix a_norm;
    Matrix x0;
    Matrix token_vectors; // T x d, frozen word embeddings of the token stream
};

struct Dataset {
    std::vector<TrainExample> examples; // sorted by doc_id

    std::vector<std::size_t> indices_of(Split split) const;
};

// In-memory pipeline: build a graph per document and embed its token
// sequence. The corpus must carry a split assignment.
Dataset build_dataset(const Corpus& corpus, const KnowledgeGraph& kg, const EmbeddingTable& table,
                      const GraphConfig& config);

TrainExample make_example(const Document& doc, const DocGraph& graph, Split split,
                          const EmbeddingTable& table, std::size_t max_tokens);

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_auroc = 0.0;
};

struct TrainResult {
    ModelState best_state;
    std::vector<EpochLog> log;
    int best_epoch = 0;
    double best_val_auroc = 0.0;
};

// Seed-deterministic epoch loop with early stopping on validation AUROC.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

struct Prediction {
    std::string doc_id;
    double score = 0.0; // p[class 1]
    int label = 0;
};

std::vector<Prediction> predict(const ModelState& state, const Dataset& dataset,
                                std::optional<Split> split = std::nullopt);

MetricsReport evaluate(const ModelState& state, const Dataset& dataset, Split split);

// Versioned JSON checkpoint: dimension config, seed, all parameter tensors.
nlohmann::json checkpoint_to_json(const ModelState& state);
ModelState checkpoint_from_json(const nlohmann::json& root);
void save_checkpoint(const ModelState& state, const std::string& path);
ModelState load_checkpoint(const std::string& path);

std::string train_log_jsonl(const std::vector<EpochLog>& log);

} // namespace medtext
