#include "medtext/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "medtext/error.hpp"
#include "medtext/rng.hpp"

namespace medtext {

using nlohmann::json;

void TrainConfig::validate() const {
    if (epochs <= 0) throw Error(ErrorKind::InvalidArgument, "epochs must be positive");
    if (batch_size <= 0) throw Error(ErrorKind::InvalidArgument, "batch size must be positive");
    if (!std::isfinite(lr) || lr < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "learning rate must be finite and non-negative");
    }
    if (!std::isfinite(pos_weight) || pos_weight <= 0.0) {
        throw Error(ErrorKind::InvalidArgument, "pos weight must be finite and positive");
    }
    if (patience < 1) throw Error(ErrorKind::InvalidArgument, "patience must be >= 1");
    model.validate();
}

std::vector<std::size_t> Dataset::indices_of(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (examples[i].split == split) out.push_back(i);
    }
    return out;
}

TrainExample make_example(const Document& doc, const DocGraph& graph, Split split,
                          const EmbeddingTable& table, std::size_t max_tokens) {
    TrainExample ex;
    ex.doc_id = doc.id;
    ex.label = doc.label;
    ex.split = split;
    ex.a_norm = graph.a_norm;
    ex.x0 = graph.x0;
    const std::vector<std::string> tokens = tokenize(doc.raw_text, max_tokens);
    if (tokens.empty()) {
        throw Error(ErrorKind::EmptyGraph, "document " + doc.id + " has no tokens");
    }
    ex.token_vectors = Matrix(tokens.size(), static_cast<std::size_t>(table.dim()));
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const std::vector<double> vec = table.embed_word(tokens[t]);
        for (std::size_t j = 0; j < vec.size(); ++j) ex.token_vectors(t, j) = vec[j];
    }
    return ex;
}

Dataset build_dataset(const Corpus& corpus, const KnowledgeGraph& kg, const EmbeddingTable& table,
                      const GraphConfig& config) {
    Dataset dataset;
    for (const Document& doc : corpus.documents) {
        auto it = corpus.split_assignment.find(doc.id);
        if (it == corpus.split_assignment.end()) {
            throw Error(ErrorKind::InvalidArgument,
                        "document " + doc.id + " has no split assignment");
        }
        const DocGraph graph = build_doc_graph(doc, kg, table, config);
        dataset.examples.push_back(make_example(doc, graph, it->second, table, config.max_tokens));
    }
    std::sort(dataset.examples.begin(), dataset.examples.end(),
              [](const TrainExample& a, const TrainExample& b) { return a.doc_id < b.doc_id; });
    return dataset;
}

namespace {

double example_forward_backward(const ModelState& state, const TrainExample& ex, double pos_weight,
                                ParamSet* grads) {
    const ForwardTrace trace = forward(state, ex.a_norm, ex.x0, ex.token_vectors);
    const double weight = ex.label == 1 ? pos_weight : 1.0;
    const double loss = weight * cross_entropy(trace.clf.probs, ex.label);
    if (grads) {
        backward(state, trace, ex.a_norm, ex.x0, ex.token_vectors, ex.label, weight, *grads);
    }
    return loss;
}

} // namespace

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
    config.validate();
    const std::vector<std::size_t> train_idx = dataset.indices_of(Split::Train);
    const std::vector<std::size_t> val_idx = dataset.indices_of(Split::Validation);
    if (train_idx.empty()) throw Error(ErrorKind::InvalidArgument, "train split is empty");
    if (val_idx.empty()) throw Error(ErrorKind::InvalidArgument, "validation split is empty");

    ModelState state = init_model(config.model, config.seed);
    Optimizer optimizer(config.optimizer, config.model, config.lr);
    Rng shuffle_rng(config.seed * 0x9e3779b97f4a7c15ULL + 0x1234567);

    auto validation_auroc = [&](const ModelState& s) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (std::size_t idx : val_idx) {
            const TrainExample& ex = dataset.examples[idx];
            const ForwardTrace trace = forward(s, ex.a_norm, ex.x0, ex.token_vectors);
            scores.push_back(trace.clf.probs[1]);
            labels.push_back(ex.label);
        }
        return auroc(scores, labels);
    };

    TrainResult result;
    result.best_state = state;
    result.best_val_auroc = -1.0;
    int stale_epochs = 0;

    std::vector<std::size_t> order = train_idx;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t cursor = 0;
        while (cursor < order.size()) {
            const std::size_t batch_end =
                std::min(cursor + static_cast<std::size_t>(config.batch_size), order.size());
            ParamSet grads = zero_params(config.model);
            for (std::size_t k = cursor; k < batch_end; ++k) {
                const TrainExample& ex = dataset.examples[order[k]];
                const double loss = example_forward_backward(state, ex, config.pos_weight, &grads);
                if (!std::isfinite(loss)) {
                    throw Error(ErrorKind::NonFiniteLoss,
                                "non-finite loss on document " + ex.doc_id + " in epoch " +
                                    std::to_string(epoch));
                }
                epoch_loss += loss;
            }
            const double inv = 1.0 / static_cast<double>(batch_end - cursor);
            for (auto& [name, tensor] : named_tensors(grads)) {
                scale_inplace(*tensor, inv);
            }
            optimizer.step(state, grads);
            cursor = batch_end;
        }
        const double train_loss = epoch_loss / static_cast<double>(order.size());
        const double val_score = validation_auroc(state);
        result.log.push_back({epoch, train_loss, val_score});

        if (val_score > result.best_val_auroc) {
            result.best_val_auroc = val_score;
            result.best_epoch = epoch;
            result.best_state = state;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= config.patience) break;
        }
    }
    return result;
}

std::vector<Prediction> predict(const ModelState& state, const Dataset& dataset,
                                std::optional<Split> split) {
    std::vector<Prediction> out;
    for (const TrainExample& ex : dataset.examples) {
        if (split && ex.split != *split) continue;
        const ForwardTrace trace = forward(state, ex.a_norm, ex.x0, ex.token_vectors);
        out.push_back({ex.doc_id, trace.clf.probs[1], ex.label});
    }
    return out;
}

MetricsReport evaluate(const ModelState& state, const Dataset& dataset, Split split) {
    const std::vector<Prediction> predictions = predict(state, dataset, split);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const Prediction& p : predictions) {
        scores.push_back(p.score);
        labels.push_back(p.label);
    }
    return compute_metrics(scores, labels);
}

json checkpoint_to_json(const ModelState& state) {
    json root;
    root["version"] = 1;
    root["kind"] = "medtext-checkpoint";
    root["config"] = {{"d", state.config.d},
                      {"h", state.config.h},
                      {"h_s", state.config.h_s},
                      {"h_t", state.config.h_t},
                      {"h_c", state.config.h_c}};
    root["seed"] = state.seed;
    json params = json::object();
    for (const auto& [name, tensor] : named_tensors(state.params)) {
        json rows = json::array();
        for (std::size_t i = 0; i < tensor->rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < tensor->cols(); ++j) row.push_back((*tensor)(i, j));
            rows.push_back(std::move(row));
        }
        params[name] = std::move(rows);
    }
    root["params"] = std::move(params);
    return root;
}

ModelState checkpoint_from_json(const json& root) {
    try {
        if (root.value("version", 0) != 1 || root.value("kind", "") != "medtext-checkpoint") {
            throw Error(ErrorKind::Parse, "not a medtext checkpoint");
        }
        ModelConfig config;
        config.d = root.at("config").at("d").get<int>();
        config.h = root.at("config").at("h").get<int>();
        config.h_s = root.at("config").at("h_s").get<int>();
        config.h_t = root.at("config").at("h_t").get<int>();
        config.h_c = root.at("config").at("h_c").get<int>();
        ModelState state;
        state.config = config;
        state.seed = root.at("seed").get<std::uint64_t>();
        state.params = zero_params(config);
        const json& params = root.at("params");
        for (auto& [name, tensor] : named_tensors(state.params)) {
            if (!params.contains(name)) {
                throw Error(ErrorKind::Parse, "checkpoint missing tensor: " + name);
            }
            const json& rows = params.at(name);
            if (rows.size() != tensor->rows()) {
                throw Error(ErrorKind::Parse, "checkpoint tensor " + name + " has wrong shape");
            }
            for (std::size_t i = 0; i < tensor->rows(); ++i) {
                if (rows[i].size() != tensor->cols()) {
                    throw Error(ErrorKind::Parse,
                                "checkpoint tensor " + name + " has wrong shape");
                }
                for (std::size_t j = 0; j < tensor->cols(); ++j) {
                    (*tensor)(i, j) = rows[i][j].get<double>();
                }
            }
        }
        return state;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("checkpoint json: ") + e.what());
    }
}

void save_checkpoint(const ModelState& state, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot write checkpoint: " + path);
    file << checkpoint_to_json(state).dump(2) << "\n";
}

ModelState load_checkpoint(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot open checkpoint: " + path);
    json root;
    try {
        file >> root;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("checkpoint json: ") + e.what());
    }
    return checkpoint_from_json(root);
}

std::string train_log_jsonl(const std::vector<EpochLog>& log) {
    std::string out;
    for (const EpochLog& entry : log) {
        json record;
        record["epoch"] = entry.epoch;
        record["train_loss"] = entry.train_loss;
        record["val_auroc"] = entry.val_auroc;
        out += record.dump();
        out.push_back('\n');
    }
    return out;
}

} // namespace medtext
