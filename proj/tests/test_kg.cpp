#include <doctest.h>

#include <algorithm>
#include <set>

#include "medtext/error.hpp"
#include "medtext/kg.hpp"
#include "medtext/rng.hpp"
#include "medtext/synthetic.hpp"
#include "medtext/tokenize.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace medtext;

namespace {

Entity make_entity(const std::string& id, const std::string& name,
                   std::vector<std::string> aliases = {}, const std::string& description = "") {
    Entity e;
    e.id = id;
    e.name = name;
    e.aliases = std::move(aliases);
    e.description = description;
    return e;
}

Document make_doc(const std::string& text) {
    Document doc;
    doc.id = "doc";
    doc.raw_text = text;
    doc.tokens = tokenize(text);
    return doc;
}

} // namespace

TEST_SUITE("kg") {

TEST_CASE("load_kg lowercases aliases and folds in the name") {
    TempDir tmp;
    const std::string path = tmp.file(
        "kg.json", R"({"entities":[{"id":"E1","name":"Heart Failure","aliases":["CHF"],
                       "description":"d"}],"edges":[]})");
    const KnowledgeGraph kg = load_kg(path);
    const Entity& e = kg.entity("E1");
    const std::set<std::string> aliases(e.aliases.begin(), e.aliases.end());
    CHECK(aliases == std::set<std::string>{"heart failure", "chf"});
}

TEST_CASE("load_kg rejects unknown-entity edges, self edges, duplicate ids") {
    TempDir tmp;
    try {
        load_kg(tmp.file("a.json",
                         R"({"entities":[{"id":"E1","name":"x"}],"edges":[["E1","E9"]]})"));
        FAIL("expected UnknownEntity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownEntity);
    }
    try {
        load_kg(tmp.file("b.json",
                         R"({"entities":[{"id":"E1","name":"x"}],"edges":[["E1","E1"]]})"));
        FAIL("expected SelfEdge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SelfEdge);
    }
    try {
        load_kg(tmp.file(
            "c.json",
            R"({"entities":[{"id":"E1","name":"x"},{"id":"E1","name":"y"}],"edges":[]})"));
        FAIL("expected DuplicateId");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DuplicateId);
    }
    // wrong value types surface as parse errors, not raw json exceptions
    try {
        load_kg(tmp.file("d.json",
                         R"({"entities":[{"id":"E1","name":"x"}],"edges":[[1,2]]})"));
        FAIL("expected Parse");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
}

TEST_CASE("link_entities prefers the longest match") {
    KnowledgeGraph kg;
    kg.add_entity(make_entity("E1", "heart failure"));
    kg.add_entity(make_entity("E2", "acute heart failure"));
    const auto mentions = link_entities(make_doc("acute heart failure observed"), kg);
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].entity_id == "E2");
    CHECK(mentions[0].begin == 0);
    CHECK(mentions[0].end == 3);
}

TEST_CASE("link_entities unigram and no-match cases") {
    KnowledgeGraph kg;
    kg.add_entity(make_entity("E1", "chf"));
    const auto one = link_entities(make_doc("chf"), kg);
    REQUIRE(one.size() == 1);
    CHECK(one[0].entity_id == "E1");
    CHECK(one[0].begin == 0);
    CHECK(one[0].end == 1);
    CHECK(link_entities(make_doc("hello world"), kg).empty());
}

TEST_CASE("link_entities spans are sorted, non-overlapping, deterministic") {
    const SyntheticBundle bundle = generate_synthetic(40, 10, 17);
    const AliasIndex index(bundle.kg);
    for (const Document& doc : bundle.corpus.documents) {
        const auto a = index.link(doc.tokens);
        const auto b = index.link(doc.tokens);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].entity_id == b[i].entity_id);
            CHECK(a[i].begin < a[i].end);
            CHECK(a[i].end <= doc.tokens.size());
            if (i > 0) CHECK(a[i].begin >= a[i - 1].end);
        }
    }
}

TEST_CASE("shortest_path_weights on direct edge, two hops, isolated vertex") {
    KnowledgeGraph kg;
    for (const char* id : {"E1", "E2", "E3", "E4"}) kg.add_entity(make_entity(id, id));
    kg.add_edge("E1", "E2");
    kg.add_edge("E2", "E3");
    const Matrix w = shortest_path_weights({"E1", "E2", "E3", "E4"}, kg, 4);
    CHECK(w(0, 1) == doctest::Approx(1.0));
    CHECK(w(0, 2) == doctest::Approx(0.5));
    CHECK(w(0, 3) == 0.0);
    CHECK(w(0, 0) == 0.0);
    CHECK_THROWS_AS(shortest_path_weights({"E9"}, kg, 4), Error);
}

TEST_CASE("max_depth truncates the reachable set") {
    KnowledgeGraph kg;
    for (const char* id : {"A", "B", "C", "D"}) kg.add_entity(make_entity(id, id));
    kg.add_edge("A", "B");
    kg.add_edge("B", "C");
    kg.add_edge("C", "D");
    const Matrix w = shortest_path_weights({"A", "D"}, kg, 2);
    CHECK(w(0, 1) == 0.0); // distance 3 exceeds the cutoff
}

TEST_CASE("BFS weights agree with Floyd-Warshall on random graphs") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(29);
        KnowledgeGraph kg;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back("N" + std::to_string(i));
            kg.add_entity(make_entity(ids.back(), ids.back()));
        }
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng.next_unit() < 0.15) {
                    adj[i][j] = adj[j][i] = true;
                    kg.add_edge(ids[i], ids[j]);
                }
            }
        }
        const int max_depth = 1 + static_cast<int>(rng.below(5));
        const Matrix weights = shortest_path_weights(ids, kg, max_depth);
        const auto dist = oracles::floyd_warshall(adj);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const int d = dist[i][j];
                const double expected =
                    (d >= 1 && d <= max_depth) ? 1.0 / static_cast<double>(d) : 0.0;
                CHECK(weights(i, j) == expected);
                CHECK(weights(i, j) == weights(j, i));
            }
        }
    }
}

TEST_CASE("description_overlap is Jaccard over token sets") {
    const Entity a = make_entity("E1", "a", {}, "acute heart failure");
    const Entity b = make_entity("E2", "b", {}, "chronic heart failure");
    CHECK(description_overlap(a, b) == doctest::Approx(0.5));
    CHECK(description_overlap(a, a) == doctest::Approx(1.0));
    const Entity empty = make_entity("E3", "c", {}, "");
    CHECK(description_overlap(a, empty) == 0.0);
}

TEST_CASE("description_overlap symmetry and bounds on random strings") {
    Rng rng(9);
    const std::vector<std::string> words = {"aa", "bb", "cc", "dd", "ee"};
    for (int trial = 0; trial < 40; ++trial) {
        auto random_desc = [&] {
            std::string text;
            const int len = rng.range_int(0, 6);
            for (int i = 0; i < len; ++i) text += words[rng.below(words.size())] + " ";
            return text;
        };
        const Entity a = make_entity("E1", "a", {}, random_desc());
        const Entity b = make_entity("E2", "b", {}, random_desc());
        const double ab = description_overlap(a, b);
        CHECK(ab == description_overlap(b, a));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        const std::set<std::string> sa = [&] {
            const auto t = tokenize(a.description);
            return std::set<std::string>(t.begin(), t.end());
        }();
        const std::set<std::string> sb = [&] {
            const auto t = tokenize(b.description);
            return std::set<std::string>(t.begin(), t.end());
        }();
        if (!sa.empty() && sa == sb) CHECK(ab == 1.0);
        if (ab == 1.0) CHECK(sa == sb);
    }
}

TEST_CASE("link_stats aggregates coverage") {
    KnowledgeGraph kg;
    kg.add_entity(make_entity("E1", "chf"));

    Corpus corpus;
    Document d1 = make_doc("chf noted chf again");
    d1.id = "d1";
    Document d2 = make_doc("nothing here");
    d2.id = "d2";
    corpus.documents = {d1, d2};

    const LinkStats stats = link_stats(corpus, kg);
    CHECK(stats.n_docs == 2);
    CHECK(stats.total_mentions == 2);
    CHECK(stats.mean_mentions_per_doc == doctest::Approx(1.0));
    CHECK(stats.mean_distinct_entities_per_doc == doctest::Approx(0.5));
    CHECK(stats.zero_mention_share == doctest::Approx(0.5));

    // No-match corpus.
    KnowledgeGraph medical;
    medical.add_entity(make_entity("E1", "sepsis"));
    const LinkStats none = link_stats(corpus, medical);
    CHECK(none.total_mentions == 0);
    CHECK(none.zero_mention_share == doctest::Approx(1.0));

    // Synthetic construction guarantees coverage.
    const SyntheticBundle bundle = generate_synthetic(30, 8, 2);
    const LinkStats synth = link_stats(bundle.corpus, bundle.kg);
    CHECK(synth.zero_mention_share == 0.0);
}

} // TEST_SUITE
