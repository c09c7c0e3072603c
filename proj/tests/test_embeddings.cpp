#include <doctest.h>

#include <sstream>

#include "medtext/embeddings.hpp"
#include "medtext/error.hpp"
#include "test_support.hpp"

using namespace medtext;

TEST_SUITE("embeddings") {

TEST_CASE("load_embeddings reads the word2vec text format") {
    TempDir tmp;
    const std::string path = tmp.file("emb.txt", "2 3\na 1 0 0\nb 0 1 0\n");
    const EmbeddingTable table = load_embeddings(path);
    CHECK(table.dim() == 3);
    CHECK(table.size() == 2);
    CHECK(table.embed_word("a") == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("load_embeddings errors") {
    std::istringstream short_line("2 3\na 1 0 0\nb 0 1\n");
    try {
        parse_embeddings(short_line);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }

    std::istringstream bad_float("1 2\na 1 oops\n");
    try {
        parse_embeddings(bad_float);
        FAIL("expected Parse");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }

    std::istringstream missing("3 2\na 1 0\nb 0 1\n");
    CHECK_THROWS_AS(parse_embeddings(missing), Error);
}

TEST_CASE("duplicate tokens keep the later vector") {
    std::istringstream dup("3 2\na 1 0\nb 0 1\na 5 5\n");
    const EmbeddingTable table = parse_embeddings(dup);
    CHECK(table.size() == 2);
    CHECK(table.embed_word("a") == std::vector<double>{5.0, 5.0});
}

TEST_CASE("embed_word is total, deterministic, and bounded for OOV") {
    const EmbeddingTable table(4);
    const auto once = table.embed_word("zzz");
    const auto twice = table.embed_word("zzz");
    CHECK(once == twice);
    CHECK(once.size() == 4);
    for (double v : once) {
        CHECK(v >= -0.1);
        CHECK(v <= 0.1);
    }
    CHECK(table.embed_word("zzz") != table.embed_word("zzy"));
}

TEST_CASE("embed_entity averages the name token vectors") {
    EmbeddingTable table(2);
    table.insert("heart", {1.0, 0.0});
    table.insert("failure", {0.0, 1.0});
    Entity e;
    e.id = "E1";
    e.name = "heart failure";
    CHECK(table.embed_entity(e) == std::vector<double>{0.5, 0.5});

    Entity single;
    single.id = "E2";
    single.name = "heart";
    CHECK(table.embed_entity(single) == table.embed_word("heart"));

    EmbeddingTable t3(3);
    t3.insert("x", {1.0, 2.0, 3.0});
    t3.insert("y", {4.0, 5.0, 6.0});
    t3.insert("z", {7.0, 8.0, 9.0});
    Entity xyz;
    xyz.id = "E3";
    xyz.name = "x y z";
    const auto mean = t3.embed_entity(xyz);
    CHECK(mean[0] == doctest::Approx((1.0 + 4.0 + 7.0) / 3.0));
    CHECK(mean[1] == doctest::Approx((2.0 + 5.0 + 8.0) / 3.0));
    CHECK(mean[2] == doctest::Approx((3.0 + 6.0 + 9.0) / 3.0));

    Entity punct;
    punct.id = "E4";
    punct.name = "...";
    CHECK_THROWS_AS(table.embed_entity(punct), Error);
}

TEST_CASE("repeated-token names collapse to the single token vector") {
    EmbeddingTable table(2);
    table.insert("chf", {0.25, -0.5});
    Entity e;
    e.id = "E1";
    e.name = "chf chf chf";
    const auto mean = table.embed_entity(e);
    CHECK(mean[0] == doctest::Approx(0.25));
    CHECK(mean[1] == doctest::Approx(-0.5));
}

} // TEST_SUITE
