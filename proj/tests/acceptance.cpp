// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; the binary
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "medtext/corpus.hpp"
#include "medtext/embeddings.hpp"
#include "medtext/graph_builder.hpp"
#include "medtext/kg.hpp"
#include "medtext/metrics.hpp"
#include "medtext/model.hpp"
#include "medtext/rng.hpp"
#include "medtext/synthetic.hpp"
#include "medtext/training.hpp"
#include "oracles.hpp"

using namespace medtext;

namespace {

struct Harness {
    int failures = 0;

    void run(const std::string& name, const std::function<bool(std::string&)>& criterion) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criterion(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %-24s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-scale, scale);
    return m;
}

Matrix random_a_norm(Rng& rng, std::size_t n) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.next_unit() < 0.5) a(i, j) = a(j, i) = rng.next_unit();
        }
    }
    return renormalize(a);
}

EmbeddingTable table_of(const SyntheticBundle& bundle) {
    std::istringstream stream(bundle.embeddings_text);
    return parse_embeddings(stream);
}

// Gradient correctness: >= 20 random small instances, every parameter block
// against central finite differences (eps 1e-5), relative error < 1e-4.
bool criterion_gradients(std::string& detail) {
    // all widths distinct so index mix-ups cannot cancel out
    const ModelConfig config{.d = 3, .h = 4, .h_s = 2, .h_t = 5, .h_c = 6};
    Rng rng(1001);
    double worst = 0.0;
    std::string worst_tensor;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.below(6);  // <= 6 vertices
        const std::size_t steps = 1 + rng.below(5); // <= 5 tokens
        const ModelState state = init_model(config, 5000 + static_cast<std::uint64_t>(trial));
        const Matrix a_norm = random_a_norm(rng, n);
        const Matrix x0 = random_matrix(rng, n, 3);
        const Matrix tokens = random_matrix(rng, steps, 3);
        const int label = trial % 2;
        const double weight = (trial % 3 == 0) ? 1.5 : 1.0;
        const auto check =
            oracles::check_gradients(state, a_norm, x0, tokens, label, weight, 1e-5);
        if (check.max_rel_err > worst) {
            worst = check.max_rel_err;
            worst_tensor = check.worst_tensor;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max rel err %.2e%s%s", worst,
                  worst_tensor.empty() ? "" : " at ", worst_tensor.c_str());
    detail = buf;
    return worst < 1e-4;
}

// Graph invariants on >= 100 random documents.
bool criterion_graph_invariants(std::string& detail) {
    Rng rng(2002);
    int docs_checked = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const SyntheticBundle bundle = generate_synthetic(30, 8 + static_cast<int>(seed), seed);
        const EmbeddingTable table = table_of(bundle);
        for (const Document& doc : bundle.corpus.documents) {
            GraphConfig config;
            config.gamma = 0.8 * rng.next_unit();
            const DocGraph g = build_doc_graph(doc, bundle.kg, table, config);

            for (const Matrix& view : g.views) {
                for (std::size_t i = 0; i < view.rows(); ++i) {
                    if (view(i, i) != 0.0) { detail = "nonzero diagonal"; return false; }
                    for (std::size_t j = 0; j < view.cols(); ++j) {
                        if (view(i, j) != view(j, i)) { detail = "asymmetric view"; return false; }
                        if (view(i, j) < 0.0 || view(i, j) > 1.0) {
                            detail = "view entry outside [0,1]";
                            return false;
                        }
                    }
                }
            }
            for (double v : g.a_combined.data()) {
                if (v != 0.0 && v <= config.gamma) {
                    detail = "masked entry at or below gamma";
                    return false;
                }
            }

            // raising gamma never adds an edge
            GraphConfig stricter = config;
            stricter.gamma = config.gamma + 0.15;
            const DocGraph gs = build_doc_graph(doc, bundle.kg, table, stricter);
            for (std::size_t k = 0; k < g.a_combined.data().size(); ++k) {
                if (gs.a_combined.data()[k] != 0.0 && g.a_combined.data()[k] == 0.0) {
                    detail = "masking not monotone";
                    return false;
                }
            }

            // alpha_i = 0 equals removing view i
            const std::size_t victim = rng.below(4);
            std::array<double, 4> alphas = config.alphas;
            alphas[victim] = 0.0;
            std::array<Matrix, 4> removed = g.views;
            removed[victim] = Matrix(g.vertices.size(), g.vertices.size());
            const Matrix via_alpha = combine_and_mask(g.views, alphas, config.gamma);
            const Matrix via_removal = combine_and_mask(removed, config.alphas, config.gamma);
            if (max_abs_diff(via_alpha, via_removal) != 0.0) {
                detail = "alpha zero differs from view removal";
                return false;
            }
            ++docs_checked;
        }
    }
    detail = std::to_string(docs_checked) + " documents checked";
    return docs_checked >= 100;
}

// BFS vs Floyd-Warshall; AUROC vs pairwise counting; AUPRC / RP80 vs
// exhaustive threshold enumeration. Exact to 1e-12.
bool criterion_oracles(std::string& detail) {
    Rng rng(3003);

    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(29); // <= 30 nodes
        KnowledgeGraph kg;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) {
            Entity e;
            e.id = "N" + std::to_string(i);
            e.name = e.id;
            ids.push_back(e.id);
            kg.add_entity(e);
        }
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng.next_unit() < 0.12) {
                    adj[i][j] = adj[j][i] = true;
                    kg.add_edge(ids[i], ids[j]);
                }
            }
        }
        const int max_depth = 1 + static_cast<int>(rng.below(6));
        const Matrix weights = shortest_path_weights(ids, kg, max_depth);
        const auto dist = oracles::floyd_warshall(adj);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const int d = dist[i][j];
                const double expected =
                    (d >= 1 && d <= max_depth) ? 1.0 / static_cast<double>(d) : 0.0;
                if (weights(i, j) != expected) {
                    detail = "BFS disagrees with Floyd-Warshall";
                    return false;
                }
            }
        }
    }

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(49); // <= 50 scores
        std::vector<double> scores;
        std::vector<int> labels;
        for (std::size_t i = 0; i < n; ++i) {
            scores.push_back(static_cast<double>(rng.below(10)) / 10.0);
            labels.push_back(rng.next_unit() < 0.4 ? 1 : 0);
        }
        labels[0] = 1;
        labels[1] = 0;
        if (std::fabs(auroc(scores, labels) - oracles::auroc_pairwise(scores, labels)) > 1e-12) {
            detail = "auroc disagrees with pairwise counting";
            return false;
        }
        if (std::fabs(auprc(scores, labels) - oracles::auprc_exhaustive(scores, labels)) > 1e-12) {
            detail = "auprc disagrees with threshold enumeration";
            return false;
        }
        const double target = rng.next_unit();
        const auto mine = recall_at_precision(scores, labels, target);
        const auto [oracle_recall, oracle_defined] =
            oracles::recall_at_precision_exhaustive(scores, labels, target);
        if (mine.defined != oracle_defined || std::fabs(mine.recall - oracle_recall) > 1e-12) {
            detail = "recall_at_precision disagrees with threshold enumeration";
            return false;
        }
    }
    return true;
}

// Zero-parameter model scores one half with D_G = D_T = 0; single-node graphs
// give D_G = 2 X_G; node permutation leaves D_G unchanged to 1e-10.
bool criterion_readout_identities(std::string& detail) {
    const ModelConfig config{.d = 4, .h = 5, .h_s = 3, .h_t = 3, .h_c = 4};
    Rng rng(4004);

    ModelState zero_state;
    zero_state.config = config;
    zero_state.params = zero_params(config);
    const Matrix a_norm = random_a_norm(rng, 4);
    const Matrix x0 = random_matrix(rng, 4, 4);
    const Matrix tokens = random_matrix(rng, 5, 4);
    const ForwardTrace trace = forward(zero_state, a_norm, x0, tokens);
    if (std::fabs(trace.clf.probs[1] - 0.5) > 1e-15) {
        detail = "zero model score is not 0.5";
        return false;
    }
    for (double v : trace.readout.d_g) {
        if (v != 0.0) { detail = "zero model D_G nonzero"; return false; }
    }
    for (double v : trace.seq.d_t) {
        if (v != 0.0) { detail = "zero model D_T nonzero"; return false; }
    }

    for (int trial = 0; trial < 10; ++trial) {
        const ModelState state = init_model(config, 6000 + static_cast<std::uint64_t>(trial));
        ReadoutTrace single;
        const Matrix row = random_matrix(rng, 1, 5);
        const auto d_g = readout(row, state.params.readout, &single);
        for (std::size_t j = 0; j < d_g.size(); ++j) {
            if (std::fabs(d_g[j] - 2.0 * single.xg(0, j)) > 1e-12) {
                detail = "single-node D_G is not 2 X_G";
                return false;
            }
        }
    }

    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng.below(6);
        const ModelState state = init_model(config, 7000 + static_cast<std::uint64_t>(trial));
        const Matrix a = random_a_norm(rng, n);
        const Matrix x = random_matrix(rng, n, 4);
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        Matrix ap(n, n), xp(n, 4);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) ap(i, j) = a(perm[i], perm[j]);
            for (std::size_t k = 0; k < 4; ++k) xp(i, k) = x(perm[i], k);
        }
        const auto base = readout(gcn_forward(a, x, state.params.gcn), state.params.readout);
        const auto shuffled = readout(gcn_forward(ap, xp, state.params.gcn), state.params.readout);
        for (std::size_t j = 0; j < base.size(); ++j) {
            if (std::fabs(base[j] - shuffled[j]) > 1e-10) {
                detail = "permutation changed D_G";
                return false;
            }
        }
    }
    return true;
}

struct E2eRun {
    double test_auroc = 0.0;
    double no_view_auroc = 0.0;
    std::string checkpoint_dump;
    MetricsReport full_report;
    MetricsReport no_view_report;
};

E2eRun run_end_to_end() {
    const SyntheticBundle bundle = generate_synthetic(200, 12, 1);
    const EmbeddingTable table = table_of(bundle);
    const Corpus corpus = split_corpus(bundle.corpus, {0.8, 0.1, 0.1}, 1);

    TrainConfig config;
    config.epochs = 30;
    config.batch_size = 8;
    config.seed = 1;
    config.model = ModelConfig{.d = table.dim(), .h = 16, .h_s = 12, .h_t = 12, .h_c = 12};

    E2eRun run;
    const Dataset dataset = build_dataset(corpus, bundle.kg, table, GraphConfig{});
    const TrainResult full = train(dataset, config);
    run.full_report = evaluate(full.best_state, dataset, Split::Test);
    run.test_auroc = run.full_report.auroc;
    run.checkpoint_dump = checkpoint_to_json(full.best_state).dump();

    GraphConfig no_views;
    no_views.alphas = {0.0, 0.0, 0.0, 0.0};
    const Dataset bare = build_dataset(corpus, bundle.kg, table, no_views);
    const TrainResult ablated = train(bare, config);
    run.no_view_report = evaluate(ablated.best_state, bare, Split::Test);
    run.no_view_auroc = run.no_view_report.auroc;
    return run;
}

E2eRun& shared_e2e() {
    static E2eRun run = run_end_to_end();
    return run;
}

// Test AUROC >= 0.95 on the seeded 200-document corpus within 30 epochs,
// byte-identical across reruns with the same seed.
bool criterion_end_to_end(std::string& detail) {
    const E2eRun& first = shared_e2e();
    const E2eRun second = run_end_to_end();
    char buf[96];
    std::snprintf(buf, sizeof(buf), "test AUROC %.4f", first.test_auroc);
    detail = buf;
    if (first.checkpoint_dump != second.checkpoint_dump) {
        detail += ", rerun checkpoint differs";
        return false;
    }
    if (std::fabs(first.test_auroc - second.test_auroc) != 0.0) {
        detail += ", rerun AUROC differs";
        return false;
    }
    return first.test_auroc >= 0.95;
}

// Dropping all four views scores no better than the full model (same seed).
bool criterion_ablation_direction(std::string& detail) {
    const E2eRun& run = shared_e2e();
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "full AUROC/AUPRC/RP80 %.4f/%.4f/%.4f vs no-view %.4f/%.4f/%.4f",
                  run.full_report.auroc, run.full_report.auprc, run.full_report.rp80,
                  run.no_view_report.auroc, run.no_view_report.auprc, run.no_view_report.rp80);
    detail = buf;
    return run.no_view_auroc <= run.test_auroc;
}

// Defaults pinned by the builder configuration.
bool criterion_defaults(std::string& detail) {
    const GraphConfig config;
    detail = "gamma " + std::to_string(config.gamma) + ", window " + std::to_string(config.window);
    return config.gamma == 0.5 && config.window == 3;
}

} // namespace

int main() {
    Harness harness;
    harness.run("gradient_correctness", criterion_gradients);
    harness.run("graph_invariants", criterion_graph_invariants);
    harness.run("oracle_equivalence", criterion_oracles);
    harness.run("readout_identities", criterion_readout_identities);
    harness.run("end_to_end_learning", criterion_end_to_end);
    harness.run("ablation_direction", criterion_ablation_direction);
    harness.run("eq1_defaults", criterion_defaults);
    if (harness.failures > 0) {
        std::printf("%d criterion(s) failed\n", harness.failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
