// Command-line driver for the medtext pipeline: synthetic data generation,
// graph building, training, evaluation, and the ablation / gamma-sweep
// experiment harnesses.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medtext/corpus.hpp"
#include "medtext/embeddings.hpp"
#include "medtext/error.hpp"
#include "medtext/graph_builder.hpp"
#include "medtext/kg.hpp"
#include "medtext/metrics.hpp"
#include "medtext/model.hpp"
#include "medtext/synthetic.hpp"
#include "medtext/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace medtext;

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream file(path);
    if (!file) throw Error(ErrorKind::Io, "cannot write file: " + path.string());
    file << content;
}

void write_run_config(const fs::path& out_dir, const std::string& command, const json& options) {
    json root;
    root["command"] = command;
    root["options"] = options;
    write_text(out_dir / "run_config.json", root.dump(2) + "\n");
}

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string field;
    while (std::getline(stream, field, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "malformed number list: " + text);
        }
    }
    return values;
}

std::array<double, 4> parse_alphas(const std::string& text) {
    const std::vector<double> values = parse_csv_doubles(text);
    if (values.size() != 4) {
        throw Error(ErrorKind::InvalidArgument, "alphas must be four comma-separated numbers");
    }
    return {values[0], values[1], values[2], values[3]};
}

SplitRatios parse_ratios(const std::string& text) {
    const std::vector<double> values = parse_csv_doubles(text);
    if (values.size() != 3) {
        throw Error(ErrorKind::InvalidArgument, "split must be three comma-separated ratios");
    }
    return {values[0], values[1], values[2]};
}

struct BuildOpts {
    std::string corpus_path;
    std::string kg_path;
    std::string emb_path;
    int window = 3;
    std::string alphas = "0.25,0.25,0.25,0.25";
    double gamma = 0.5;
    int max_depth = 4;
    std::size_t max_tokens = kDefaultMaxTokens;
    std::string split = "0.8,0.1,0.1";
};

void add_build_options(CLI::App* cmd, BuildOpts& opts) {
    cmd->add_option("--corpus", opts.corpus_path, "corpus JSON-lines file")->required();
    cmd->add_option("--kg", opts.kg_path, "knowledge graph JSON file")->required();
    cmd->add_option("--emb", opts.emb_path, "embedding text file")->required();
    cmd->add_option("--window", opts.window, "co-occurrence window size");
    cmd->add_option("--alphas", opts.alphas, "view weights a1,a2,a3,a4");
    cmd->add_option("--gamma", opts.gamma, "edge masking threshold");
    cmd->add_option("--max-depth", opts.max_depth, "BFS depth cutoff for view 2");
    cmd->add_option("--max-tokens", opts.max_tokens, "token truncation per document");
    cmd->add_option("--split", opts.split, "train,validation,test ratios");
}

GraphConfig to_graph_config(const BuildOpts& opts) {
    GraphConfig config;
    config.window = opts.window;
    config.alphas = parse_alphas(opts.alphas);
    config.gamma = opts.gamma;
    config.max_depth = opts.max_depth;
    config.max_tokens = opts.max_tokens;
    if (config.window < 2) throw Error(ErrorKind::InvalidArgument, "window must be >= 2");
    if (config.max_depth < 1) throw Error(ErrorKind::InvalidArgument, "max-depth must be >= 1");
    if (config.max_tokens < 1) throw Error(ErrorKind::InvalidArgument, "max-tokens must be >= 1");
    return config;
}

struct TrainOpts {
    int epochs = 30;
    int batch = 8;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    std::string optimizer = "adam";
    double pos_weight = 1.0;
    int patience = 5;
    int h = 128;
    int h_s = 128;
    int h_t = 128;
    int h_c = 64;
};

void add_train_options(CLI::App* cmd, TrainOpts& opts) {
    cmd->add_option("--epochs", opts.epochs, "maximum training epochs");
    cmd->add_option("--batch", opts.batch, "minibatch size");
    cmd->add_option("--lr", opts.lr, "learning rate");
    cmd->add_option("--seed", opts.seed, "seed for all randomness");
    cmd->add_option("--optimizer", opts.optimizer, "adam or sgd");
    cmd->add_option("--pos-weight", opts.pos_weight, "positive-class loss weight");
    cmd->add_option("--patience", opts.patience, "early-stop patience on validation AUROC");
    cmd->add_option("--hidden", opts.h, "gcn / readout width");
    cmd->add_option("--seq-hidden", opts.h_s, "recurrent hidden size per direction");
    cmd->add_option("--seq-out", opts.h_t, "sequence branch output width");
    cmd->add_option("--mlp-hidden", opts.h_c, "classifier hidden width");
}

TrainConfig to_train_config(const TrainOpts& opts, int dim) {
    TrainConfig config;
    config.epochs = opts.epochs;
    config.batch_size = opts.batch;
    config.lr = opts.lr;
    config.seed = opts.seed;
    config.optimizer = optimizer_from_name(opts.optimizer);
    config.pos_weight = opts.pos_weight;
    config.patience = opts.patience;
    config.model.d = dim;
    config.model.h = opts.h;
    config.model.h_s = opts.h_s;
    config.model.h_t = opts.h_t;
    config.model.h_c = opts.h_c;
    config.validate();
    return config;
}

json train_opts_json(const TrainOpts& opts) {
    return json{{"epochs", opts.epochs},   {"batch", opts.batch},
                {"lr", opts.lr},           {"seed", opts.seed},
                {"optimizer", opts.optimizer}, {"pos_weight", opts.pos_weight},
                {"patience", opts.patience},   {"hidden", opts.h},
                {"seq_hidden", opts.h_s},      {"seq_out", opts.h_t},
                {"mlp_hidden", opts.h_c}};
}

json build_opts_json(const BuildOpts& opts) {
    return json{{"corpus", opts.corpus_path}, {"kg", opts.kg_path},
                {"emb", opts.emb_path},       {"window", opts.window},
                {"alphas", opts.alphas},      {"gamma", opts.gamma},
                {"max_depth", opts.max_depth}, {"max_tokens", opts.max_tokens},
                {"split", opts.split}};
}

// ---- dataset assembly from a built graph directory ----

Dataset load_dataset(const std::string& graphs_dir, const std::string& corpus_path,
                     const std::string& emb_path) {
    const fs::path dir(graphs_dir);
    std::ifstream manifest_file(dir / "manifest.json");
    if (!manifest_file) {
        throw Error(ErrorKind::Io, "cannot open manifest: " + (dir / "manifest.json").string());
    }
    json manifest;
    try {
        manifest_file >> manifest;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("manifest json: ") + e.what());
    }
    const GraphConfig config = graph_config_from_json(manifest.at("config"));
    const Corpus corpus = load_corpus(corpus_path, config.max_tokens);
    const EmbeddingTable table = load_embeddings(emb_path);

    std::map<std::string, const Document*> by_id;
    for (const Document& doc : corpus.documents) by_id.emplace(doc.id, &doc);

    Dataset dataset;
    for (const json& entry : manifest.at("docs")) {
        const std::string id = entry.at("id").get<std::string>();
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw Error(ErrorKind::UnknownEntity, "manifest document not in corpus: " + id);
        }
        std::ifstream graph_file(dir / entry.at("file").get<std::string>());
        if (!graph_file) {
            throw Error(ErrorKind::Io, "cannot open graph file for document " + id);
        }
        json graph_json;
        graph_file >> graph_json;
        const DocGraph graph = doc_graph_from_json(graph_json);
        dataset.examples.push_back(make_example(*it->second, graph,
                                                split_from_name(entry.at("split").get<std::string>()),
                                                table, config.max_tokens));
    }
    std::sort(dataset.examples.begin(), dataset.examples.end(),
              [](const TrainExample& a, const TrainExample& b) { return a.doc_id < b.doc_id; });
    return dataset;
}

// ---- subcommands ----

void cmd_gen_synth(int docs, int entities, std::uint64_t seed, int dim, const std::string& out) {
    const SyntheticBundle bundle = generate_synthetic(docs, entities, seed, dim);
    const fs::path dir(out);
    fs::create_directories(dir);
    save_corpus(bundle.corpus, (dir / "corpus.jsonl").string());
    save_kg(bundle.kg, (dir / "kg.json").string());
    write_text(dir / "embeddings.txt", bundle.embeddings_text);

    json manifest;
    manifest["files"] = {"corpus.jsonl", "kg.json", "embeddings.txt"};
    manifest["n_docs"] = bundle.corpus.documents.size();
    manifest["n_entities"] = bundle.kg.entities().size();
    manifest["n_edges"] = bundle.kg.edges().size();
    manifest["embedding_dim"] = bundle.embedding_dim;
    write_text(dir / "gen_manifest.json", manifest.dump(2) + "\n");
    write_run_config(dir, "gen-synth",
                     json{{"docs", docs}, {"entities", entities}, {"seed", seed}, {"dim", dim}});

    std::size_t positives = 0;
    for (const Document& doc : bundle.corpus.documents) positives += doc.label == 1 ? 1 : 0;
    std::cout << "wrote " << bundle.corpus.documents.size() << " documents (" << positives
              << " positive), " << bundle.kg.entities().size() << " entities, "
              << bundle.kg.edges().size() << " edges to " << out << "\n";
}

void cmd_build_graph(const BuildOpts& opts, std::uint64_t seed, const std::string& out) {
    const GraphConfig config = to_graph_config(opts);
    const SplitRatios ratios = parse_ratios(opts.split);

    Corpus corpus = load_corpus(opts.corpus_path, config.max_tokens);
    corpus = split_corpus(std::move(corpus), ratios, seed);
    const KnowledgeGraph kg = load_kg(opts.kg_path);
    const EmbeddingTable table = load_embeddings(opts.emb_path);

    const fs::path dir(out);
    fs::create_directories(dir / "graphs");

    json docs = json::array();
    std::size_t total_vertices = 0;
    std::size_t total_edges = 0;
    for (const Document& doc : corpus.documents) {
        const DocGraph graph = build_doc_graph(doc, kg, table, config);
        const std::string file = "graphs/" + doc.id + ".json";
        write_text(dir / file, doc_graph_to_json(graph, config).dump() + "\n");
        total_vertices += graph.vertices.size();
        for (std::size_t i = 0; i < graph.a_combined.rows(); ++i) {
            for (std::size_t j = i + 1; j < graph.a_combined.cols(); ++j) {
                if (graph.a_combined(i, j) != 0.0) ++total_edges;
            }
        }
        docs.push_back({{"id", doc.id},
                        {"label", doc.label},
                        {"split", split_name(corpus.split_assignment.at(doc.id))},
                        {"file", file}});
    }

    json manifest;
    manifest["version"] = 1;
    manifest["config"] = graph_config_to_json(config);
    manifest["split_ratios"] = {ratios.train, ratios.validation, ratios.test};
    manifest["seed"] = seed;
    manifest["docs"] = docs;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    json options = build_opts_json(opts);
    options["seed"] = seed;
    write_run_config(dir, "build-graph", options);

    const Vocabulary vocab = build_vocabulary(corpus);
    const double n = static_cast<double>(corpus.documents.size());
    std::printf("built %zu graphs: %.1f vertices/doc, %.1f edges/doc, train vocabulary %zu\n",
                corpus.documents.size(), static_cast<double>(total_vertices) / n,
                static_cast<double>(total_edges) / n, vocab.size());
}

void cmd_train(const std::string& graphs_dir, const std::string& corpus_path,
               const std::string& emb_path, const TrainOpts& opts, const std::string& out) {
    const EmbeddingTable table = load_embeddings(emb_path);
    const TrainConfig config = to_train_config(opts, table.dim());
    const Dataset dataset = load_dataset(graphs_dir, corpus_path, emb_path);
    const TrainResult result = train(dataset, config);

    const fs::path dir(out);
    fs::create_directories(dir);
    save_checkpoint(result.best_state, (dir / "checkpoint.json").string());
    write_text(dir / "train_log.jsonl", train_log_jsonl(result.log));
    json options = train_opts_json(opts);
    options["graphs"] = graphs_dir;
    options["corpus"] = corpus_path;
    options["emb"] = emb_path;
    write_run_config(dir, "train", options);

    std::printf("trained %zu epochs, best validation AUROC %.4f at epoch %d\n",
                result.log.size(), result.best_val_auroc, result.best_epoch);
}

void cmd_evaluate(const std::string& graphs_dir, const std::string& corpus_path,
                  const std::string& emb_path, const std::string& checkpoint_path,
                  const std::string& split, const std::string& out) {
    const Split which = split_from_name(split);
    const ModelState state = load_checkpoint(checkpoint_path);
    const Dataset dataset = load_dataset(graphs_dir, corpus_path, emb_path);
    const MetricsReport report = evaluate(state, dataset, which);

    const fs::path dir(out);
    fs::create_directories(dir);
    write_text(dir / "metrics.json", metrics_to_json(report).dump(2) + "\n");
    write_text(dir / "pr_curve.tsv", pr_curve_tsv(report.pr_points));
    write_run_config(dir, "evaluate",
                     json{{"graphs", graphs_dir},
                          {"corpus", corpus_path},
                          {"emb", emb_path},
                          {"checkpoint", checkpoint_path},
                          {"split", split}});

    std::printf("%s: AUROC %.4f  AUPRC %.4f  RP80 %.4f%s  (%zu pos / %zu neg)\n", split.c_str(),
                report.auroc, report.auprc, report.rp80, report.rp80_defined ? "" : " (undefined)",
                report.n_pos, report.n_neg);
}

void cmd_predict(const std::string& graphs_dir, const std::string& corpus_path,
                 const std::string& emb_path, const std::string& checkpoint_path,
                 const std::string& split, const std::string& out) {
    const Split which = split_from_name(split);
    const ModelState state = load_checkpoint(checkpoint_path);
    const Dataset dataset = load_dataset(graphs_dir, corpus_path, emb_path);
    const std::vector<Prediction> predictions = predict(state, dataset, which);

    const fs::path dir(out);
    fs::create_directories(dir);
    std::string tsv = "doc_id\tscore\tlabel\n";
    char line[128];
    for (const Prediction& p : predictions) {
        std::snprintf(line, sizeof(line), "%s\t%.6f\t%d\n", p.doc_id.c_str(), p.score, p.label);
        tsv += line;
    }
    write_text(dir / "predictions.tsv", tsv);
    write_run_config(dir, "predict",
                     json{{"graphs", graphs_dir},
                          {"corpus", corpus_path},
                          {"emb", emb_path},
                          {"checkpoint", checkpoint_path},
                          {"split", split}});
    std::printf("wrote %zu predictions for split %s\n", predictions.size(), split.c_str());
}

// Shared by ablate and sweep-gamma: rebuild graphs in memory with the given
// config, train with a fixed seed, return test metrics.
MetricsReport run_pipeline(const Corpus& corpus, const KnowledgeGraph& kg,
                           const EmbeddingTable& table, const GraphConfig& graph_config,
                           const TrainConfig& train_config) {
    const Dataset dataset = build_dataset(corpus, kg, table, graph_config);
    const TrainResult result = train(dataset, train_config);
    return evaluate(result.best_state, dataset, Split::Test);
}

std::set<int> parse_view_subset(const std::string& text) {
    std::set<int> views;
    std::stringstream stream(text);
    std::string field;
    while (std::getline(stream, field, ',')) {
        int view = 0;
        try {
            view = std::stoi(field);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "malformed view list: " + text);
        }
        if (view < 1 || view > 4) {
            throw Error(ErrorKind::InvalidArgument,
                        "view ids must be in 1..4, got " + std::to_string(view));
        }
        views.insert(view);
    }
    if (views.empty()) {
        throw Error(ErrorKind::InvalidArgument, "empty view list");
    }
    return views;
}

void cmd_ablate(const BuildOpts& build_opts, const TrainOpts& train_opts,
                const std::vector<std::string>& drop_views, const std::string& out) {
    const GraphConfig base_config = to_graph_config(build_opts);
    const SplitRatios ratios = parse_ratios(build_opts.split);
    std::vector<std::set<int>> subsets;
    for (const std::string& text : drop_views) subsets.push_back(parse_view_subset(text));

    Corpus corpus = load_corpus(build_opts.corpus_path, base_config.max_tokens);
    corpus = split_corpus(std::move(corpus), ratios, train_opts.seed);
    const KnowledgeGraph kg = load_kg(build_opts.kg_path);
    const EmbeddingTable table = load_embeddings(build_opts.emb_path);
    const TrainConfig train_config = to_train_config(train_opts, table.dim());

    std::string tsv = "dropped\tauroc\tauprc\trp80\trp80_defined\n";
    char line[160];
    auto run_row = [&](const std::string& label, const GraphConfig& config) {
        const MetricsReport report = run_pipeline(corpus, kg, table, config, train_config);
        std::snprintf(line, sizeof(line), "%s\t%.6f\t%.6f\t%.6f\t%d\n", label.c_str(),
                      report.auroc, report.auprc, report.rp80, report.rp80_defined ? 1 : 0);
        tsv += line;
        std::fputs(line, stdout);
    };

    run_row("none", base_config);
    for (const std::set<int>& subset : subsets) {
        GraphConfig config = base_config;
        std::string label;
        for (int view : subset) {
            config.alphas[static_cast<std::size_t>(view - 1)] = 0.0;
            if (!label.empty()) label.push_back(',');
            label += std::to_string(view);
        }
        run_row(label, config);
    }

    const fs::path dir(out);
    fs::create_directories(dir);
    write_text(dir / "ablation.tsv", tsv);
    json options = build_opts_json(build_opts);
    options.update(train_opts_json(train_opts));
    options["drop_views"] = drop_views;
    write_run_config(dir, "ablate", options);
}

void cmd_sweep_gamma(const BuildOpts& build_opts, const TrainOpts& train_opts, double from,
                     double to, double step, const std::string& out) {
    if (step <= 0.0) throw Error(ErrorKind::InvalidArgument, "step must be positive");
    if (from > to) throw Error(ErrorKind::InvalidArgument, "sweep range is empty");
    const GraphConfig base_config = to_graph_config(build_opts);
    const SplitRatios ratios = parse_ratios(build_opts.split);

    Corpus corpus = load_corpus(build_opts.corpus_path, base_config.max_tokens);
    corpus = split_corpus(std::move(corpus), ratios, train_opts.seed);
    const KnowledgeGraph kg = load_kg(build_opts.kg_path);
    const EmbeddingTable table = load_embeddings(build_opts.emb_path);
    const TrainConfig train_config = to_train_config(train_opts, table.dim());

    std::string tsv = "gamma\tauroc\n";
    char line[64];
    for (double gamma = from; gamma <= to + 1e-9; gamma += step) {
        GraphConfig config = base_config;
        config.gamma = gamma;
        const MetricsReport report = run_pipeline(corpus, kg, table, config, train_config);
        std::snprintf(line, sizeof(line), "%.4f\t%.6f\n", gamma, report.auroc);
        tsv += line;
        std::fputs(line, stdout);
    }

    const fs::path dir(out);
    fs::create_directories(dir);
    write_text(dir / "sweep.tsv", tsv);
    json options = build_opts_json(build_opts);
    options.update(train_opts_json(train_opts));
    options["from"] = from;
    options["to"] = to;
    options["step"] = step;
    write_run_config(dir, "sweep-gamma", options);
}

void cmd_link_stats(const std::string& corpus_path, const std::string& kg_path,
                    const std::string& out) {
    const Corpus corpus = load_corpus(corpus_path);
    const KnowledgeGraph kg = load_kg(kg_path);
    const LinkStats stats = link_stats(corpus, kg);

    json root;
    root["n_docs"] = stats.n_docs;
    root["total_mentions"] = stats.total_mentions;
    root["mean_mentions_per_doc"] = stats.mean_mentions_per_doc;
    root["mean_distinct_entities_per_doc"] = stats.mean_distinct_entities_per_doc;
    root["zero_mention_share"] = stats.zero_mention_share;

    const fs::path dir(out);
    fs::create_directories(dir);
    write_text(dir / "link_stats.json", root.dump(2) + "\n");
    write_run_config(dir, "link-stats", json{{"corpus", corpus_path}, {"kg", kg_path}});

    std::printf("%zu docs: %.2f mentions/doc, %.2f distinct entities/doc, %.2f%% with no mention\n",
                stats.n_docs, stats.mean_mentions_per_doc, stats.mean_distinct_entities_per_doc,
                100.0 * stats.zero_mention_share);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"medtext: knowledge-graph enhanced multiview document classification"};
    app.require_subcommand(1);

    // gen-synth
    int gen_docs = 200, gen_entities = 12, gen_dim = 32;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    CLI::App* gen = app.add_subcommand("gen-synth", "generate a synthetic corpus + KG + embeddings");
    gen->add_option("--docs", gen_docs, "number of documents (>= 10)");
    gen->add_option("--entities", gen_entities, "number of KG entities (>= 8)");
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->add_option("--dim", gen_dim, "embedding dimension");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->callback([&] { cmd_gen_synth(gen_docs, gen_entities, gen_seed, gen_dim, gen_out); });

    // build-graph
    BuildOpts build_opts;
    std::uint64_t build_seed = 1;
    std::string build_out;
    CLI::App* build = app.add_subcommand("build-graph", "build per-document multiview graphs");
    add_build_options(build, build_opts);
    build->add_option("--seed", build_seed, "seed for the split shuffle");
    build->add_option("--out", build_out, "output directory")->required();
    build->callback([&] { cmd_build_graph(build_opts, build_seed, build_out); });

    // train
    std::string train_graphs, train_corpus, train_emb, train_out;
    TrainOpts train_opts;
    CLI::App* train_cmd = app.add_subcommand("train", "train a classifier on built graphs");
    train_cmd->add_option("--graphs", train_graphs, "built graph directory")->required();
    train_cmd->add_option("--corpus", train_corpus, "corpus JSON-lines file")->required();
    train_cmd->add_option("--emb", train_emb, "embedding text file")->required();
    add_train_options(train_cmd, train_opts);
    train_cmd->add_option("--out", train_out, "output directory")->required();
    train_cmd->callback(
        [&] { cmd_train(train_graphs, train_corpus, train_emb, train_opts, train_out); });

    // evaluate
    std::string eval_graphs, eval_corpus, eval_emb, eval_ckpt, eval_out;
    std::string eval_split = "test";
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "compute metrics for a checkpoint");
    eval_cmd->add_option("--graphs", eval_graphs, "built graph directory")->required();
    eval_cmd->add_option("--corpus", eval_corpus, "corpus JSON-lines file")->required();
    eval_cmd->add_option("--emb", eval_emb, "embedding text file")->required();
    eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
    eval_cmd->add_option("--split", eval_split, "train, validation, or test");
    eval_cmd->add_option("--out", eval_out, "output directory")->required();
    eval_cmd->callback(
        [&] { cmd_evaluate(eval_graphs, eval_corpus, eval_emb, eval_ckpt, eval_split, eval_out); });

    // predict
    std::string pred_graphs, pred_corpus, pred_emb, pred_ckpt, pred_out;
    std::string pred_split = "test";
    CLI::App* pred_cmd = app.add_subcommand("predict", "write per-document scores");
    pred_cmd->add_option("--graphs", pred_graphs, "built graph directory")->required();
    pred_cmd->add_option("--corpus", pred_corpus, "corpus JSON-lines file")->required();
    pred_cmd->add_option("--emb", pred_emb, "embedding text file")->required();
    pred_cmd->add_option("--checkpoint", pred_ckpt, "checkpoint file")->required();
    pred_cmd->add_option("--split", pred_split, "train, validation, or test");
    pred_cmd->add_option("--out", pred_out, "output directory")->required();
    pred_cmd->callback(
        [&] { cmd_predict(pred_graphs, pred_corpus, pred_emb, pred_ckpt, pred_split, pred_out); });

    // ablate
    BuildOpts ablate_build;
    TrainOpts ablate_train;
    std::vector<std::string> ablate_drop;
    std::string ablate_out;
    CLI::App* ablate_cmd = app.add_subcommand("ablate", "retrain with view subsets removed");
    add_build_options(ablate_cmd, ablate_build);
    add_train_options(ablate_cmd, ablate_train);
    ablate_cmd
        ->add_option("--drop-views", ablate_drop,
                     "view subset to drop, e.g. 1 or 1,2 (repeatable)")
        ->required();
    ablate_cmd->add_option("--out", ablate_out, "output directory")->required();
    ablate_cmd->callback([&] { cmd_ablate(ablate_build, ablate_train, ablate_drop, ablate_out); });

    // sweep-gamma
    BuildOpts sweep_build;
    TrainOpts sweep_train;
    double sweep_from = 0.1, sweep_to = 0.9, sweep_step = 0.1;
    std::string sweep_out;
    CLI::App* sweep_cmd = app.add_subcommand("sweep-gamma", "retrain across masking thresholds");
    add_build_options(sweep_cmd, sweep_build);
    add_train_options(sweep_cmd, sweep_train);
    sweep_cmd->add_option("--from", sweep_from, "first gamma");
    sweep_cmd->add_option("--to", sweep_to, "last gamma");
    sweep_cmd->add_option("--step", sweep_step, "gamma increment");
    sweep_cmd->add_option("--out", sweep_out, "output directory")->required();
    sweep_cmd->callback([&] {
        cmd_sweep_gamma(sweep_build, sweep_train, sweep_from, sweep_to, sweep_step, sweep_out);
    });

    // link-stats
    std::string stats_corpus, stats_kg, stats_out;
    CLI::App* stats_cmd = app.add_subcommand("link-stats", "report entity linker coverage");
    stats_cmd->add_option("--corpus", stats_corpus, "corpus JSON-lines file")->required();
    stats_cmd->add_option("--kg", stats_kg, "knowledge graph JSON file")->required();
    stats_cmd->add_option("--out", stats_out, "output directory")->required();
    stats_cmd->callback([&] { cmd_link_stats(stats_corpus, stats_kg, stats_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const medtext::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
