#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "medtext/error.hpp"
#include "medtext/synthetic.hpp"
#include "medtext/training.hpp"
#include "test_support.hpp"

using namespace medtext;

namespace {

struct Fixture {
    SyntheticBundle bundle;
    EmbeddingTable table;
    Dataset dataset;

    explicit Fixture(int docs = 40, std::uint64_t seed = 2)
        : bundle(generate_synthetic(docs, 10, seed)), table(make_table(bundle)) {
        Corpus corpus = split_corpus(bundle.corpus, {0.7, 0.15, 0.15}, seed);
        dataset = build_dataset(corpus, bundle.kg, table, GraphConfig{});
    }

    static EmbeddingTable make_table(const SyntheticBundle& b) {
        std::istringstream stream(b.embeddings_text);
        return parse_embeddings(stream);
    }
};

TrainConfig small_config() {
    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 4;
    config.seed = 7;
    config.model = ModelConfig{.d = 32, .h = 8, .h_s = 6, .h_t = 6, .h_c = 8};
    return config;
}

} // namespace

TEST_SUITE("training") {

TEST_CASE("two runs with the same seed produce identical checkpoints and logs") {
    const Fixture fx;
    const TrainConfig config = small_config();
    const TrainResult a = train(fx.dataset, config);
    const TrainResult b = train(fx.dataset, config);
    CHECK(checkpoint_to_json(a.best_state).dump() == checkpoint_to_json(b.best_state).dump());
    CHECK(train_log_jsonl(a.log) == train_log_jsonl(b.log));
    CHECK(a.best_epoch == b.best_epoch);
}

TEST_CASE("lr = 0 leaves the parameters at their initialization") {
    const Fixture fx;
    TrainConfig config = small_config();
    config.lr = 0.0;
    config.epochs = 2;
    const TrainResult result = train(fx.dataset, config);
    const ModelState fresh = init_model(config.model, config.seed);
    auto trained = named_tensors(result.best_state.params);
    auto initial = named_tensors(fresh.params);
    for (std::size_t i = 0; i < trained.size(); ++i) {
        CHECK(max_abs_diff(*trained[i].second, *initial[i].second) == 0.0);
    }
}

TEST_CASE("empty splits are rejected") {
    const Fixture fx;
    Dataset no_val;
    for (const TrainExample& ex : fx.dataset.examples) {
        if (ex.split != Split::Validation) no_val.examples.push_back(ex);
    }
    CHECK_THROWS_AS(train(no_val, small_config()), Error);
    CHECK_THROWS_AS(train(Dataset{}, small_config()), Error);
}

TEST_CASE("non-finite losses are surfaced, not masked") {
    // cross_entropy must propagate a NaN probability so the train loop's
    // abort-with-diagnostic guard can observe divergence
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(std::isfinite(cross_entropy({nan, nan}, 0)));

    // non-finite hyperparameters are rejected before training starts
    TrainConfig config = small_config();
    config.lr = nan;
    CHECK_THROWS_AS(config.validate(), Error);
    config = small_config();
    config.pos_weight = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("config validation") {
    TrainConfig config = small_config();
    config.patience = 0;
    CHECK_THROWS_AS(config.validate(), Error);
    config = small_config();
    config.batch_size = 0;
    CHECK_THROWS_AS(config.validate(), Error);
    config = small_config();
    config.epochs = -1;
    CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("zero-parameter checkpoint scores everything at one half") {
    const Fixture fx;
    ModelState state;
    state.config = small_config().model;
    state.params = zero_params(state.config);
    for (const Prediction& p : predict(state, fx.dataset)) {
        CHECK(p.score == doctest::Approx(0.5));
    }
}

TEST_CASE("prediction is stateless across batch composition") {
    const Fixture fx;
    const ModelState state = init_model(small_config().model, 19);

    const auto all = predict(state, fx.dataset);
    Dataset tail;
    tail.examples.assign(fx.dataset.examples.begin() + 5, fx.dataset.examples.end());
    const auto partial = predict(state, tail);
    REQUIRE(all.size() == tail.examples.size() + 5);
    for (std::size_t i = 0; i < partial.size(); ++i) {
        CHECK(partial[i].doc_id == all[i + 5].doc_id);
        CHECK(partial[i].score == all[i + 5].score);
    }
    for (const Prediction& p : all) {
        CHECK(p.score > 0.0);
        CHECK(p.score < 1.0);
    }
}

TEST_CASE("checkpoint json round-trips exactly") {
    const ModelState state = init_model(ModelConfig{.d = 5, .h = 4, .h_s = 3, .h_t = 3, .h_c = 4},
                                        33);
    TempDir tmp;
    const std::string path = tmp.file_path("ckpt.json");
    save_checkpoint(state, path);
    const ModelState loaded = load_checkpoint(path);
    CHECK(loaded.config.d == state.config.d);
    CHECK(loaded.seed == state.seed);
    auto a = named_tensors(state.params);
    auto b = named_tensors(loaded.params);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(max_abs_diff(*a[i].second, *b[i].second) == 0.0);
    }

    CHECK_THROWS_AS(load_checkpoint(tmp.file("junk.json", "{\"version\": 3}")), Error);
    CHECK_THROWS_AS(load_checkpoint(tmp.file_path("missing.json")), Error);

    // wrong value types surface as parse errors
    nlohmann::json mangled = checkpoint_to_json(state);
    mangled["config"]["h"] = "wide";
    try {
        checkpoint_from_json(mangled);
        FAIL("expected Parse");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
}

TEST_CASE("training learns the planted synthetic signal") {
    const Fixture fx(80, 6);
    TrainConfig config = small_config();
    config.epochs = 20;
    config.model = ModelConfig{.d = 32, .h = 12, .h_s = 8, .h_t = 8, .h_c = 8};
    const TrainResult result = train(fx.dataset, config);
    CHECK(result.best_val_auroc > 0.8);
    const MetricsReport report = evaluate(result.best_state, fx.dataset, Split::Test);
    CHECK(report.auroc > 0.8);
}

TEST_CASE("train log serializes one json object per epoch") {
    const std::vector<EpochLog> log = {{1, 0.5, 0.75}, {2, 0.25, 0.9}};
    const std::string text = train_log_jsonl(log);
    std::istringstream stream(text);
    std::string line;
    int lines = 0;
    while (std::getline(stream, line)) {
        const auto parsed = nlohmann::json::parse(line);
        CHECK(parsed.contains("epoch"));
        CHECK(parsed.contains("train_loss"));
        CHECK(parsed.contains("val_auroc"));
        ++lines;
    }
    CHECK(lines == 2);
}

} // TEST_SUITE
