#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <tuple>

#include "rtlrc/error.hpp"
#include "rtlrc/store.hpp"
#include "synthetic.hpp"

using namespace rtlrc;

namespace {

Embedding vec(std::vector<double> v) {
    l2_normalize(v);
    return Embedding{std::move(v)};
}

Chunk chunk(const std::string& path, std::size_t ordinal) {
    return Chunk{"text " + std::to_string(ordinal), path, ordinal, 2, false};
}

}  // namespace

TEST_CASE("top_k orders by cosine and skips zero vectors") {
    std::vector<Chunk> chunks = {chunk("a.v", 0), chunk("a.v", 1), chunk("b.v", 2), chunk("c.v", 3)};
    auto store = build_store(chunks, {vec({1, 0}), vec({0, 1}), vec({1, 1}), Embedding{{0, 0}}});
    CHECK(store.frozen());

    auto hits = store.top_k(vec({1, 0}), 10);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].chunk_id == "a.v#0");
    CHECK(hits[0].score == doctest::Approx(1.0));
    CHECK(hits[1].chunk_id == "b.v#2");
    CHECK(hits[1].score == doctest::Approx(std::sqrt(0.5)));
    CHECK(hits[2].chunk_id == "a.v#1");

    CHECK(store.top_k(vec({1, 0}), 1).size() == 1);
    CHECK(store.top_k(vec({1, 0}), 0).empty());
}

TEST_CASE("ties break by source path then ordinal") {
    std::vector<Chunk> chunks = {chunk("b.v", 0), chunk("a.v", 5), chunk("a.v", 1)};
    auto store = build_store(chunks, {vec({1, 0}), vec({1, 0}), vec({1, 0})});
    auto hits = store.top_k(vec({1, 0}), 3);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].chunk_id == "a.v#1");
    CHECK(hits[1].chunk_id == "a.v#5");
    CHECK(hits[2].chunk_id == "b.v#0");
}

TEST_CASE("store construction errors") {
    CHECK_THROWS_AS(build_store({chunk("a.v", 0)}, {}), LengthMismatch);
    CHECK_THROWS_AS(build_store({chunk("a.v", 0), chunk("a.v", 1)}, {vec({1, 0}), vec({1, 0, 0})}),
                    DimensionMismatch);
    CHECK_THROWS_AS(build_store({chunk("a.v", 0), chunk("a.v", 0)}, {vec({1, 0}), vec({1, 0})}), Error);

    auto store = build_store({chunk("a.v", 0)}, {vec({1, 0})});
    CHECK_THROWS_AS(store.add({"x#1", "x", 1, "", vec({1, 0})}), Error);
    CHECK_THROWS_AS(store.top_k(vec({1, 0, 0}), 1), DimensionMismatch);
}

TEST_CASE("property: top_k equals a full sort with the same tie rule") {
    testing::Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = testing::uniform(rng, 1, 60), dim = testing::uniform(rng, 2, 6);
        std::vector<Chunk> chunks;
        std::vector<Embedding> embs;
        for (std::size_t i = 0; i < n; ++i) {
            chunks.push_back(chunk("f" + std::to_string(testing::uniform(rng, 0, 3)) + ".v", i));
            std::vector<double> v(dim);
            // Small integer coordinates make exact duplicates (ties) common.
            for (auto& x : v) x = static_cast<double>(testing::uniform(rng, 0, 2));
            embs.push_back(vec(v));
        }
        auto store = build_store(chunks, embs);
        std::vector<double> q(dim);
        for (auto& x : q) x = static_cast<double>(testing::uniform(rng, 0, 2)) + 0.5;
        auto query = vec(q);

        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (!embs[i].is_zero()) idx.push_back(i);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            double sa = std::clamp(dot(embs[a], query), -1.0, 1.0);
            double sb = std::clamp(dot(embs[b], query), -1.0, 1.0);
            if (sa != sb) return sa > sb;
            return std::tie(chunks[a].source_path, chunks[a].ordinal) <
                   std::tie(chunks[b].source_path, chunks[b].ordinal);
        });

        std::size_t k = testing::uniform(rng, 1, n + 2);
        auto hits = store.top_k(query, k);
        REQUIRE(hits.size() == std::min(k, idx.size()));
        for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].index == idx[i]);
    }
}

TEST_CASE("property: save then load reproduces the store") {
    testing::Rng rng(42);
    auto path = std::filesystem::temp_directory_path() / "rtlrc_store_rt.jsonl";
    for (int trial = 0; trial < 10; ++trial) {
        auto file = testing::random_verilog_file(rng, 2000);
        auto chunks = make_chunks({{"rtl/x.v", file}}, {SplitKeyword::LineBreak, 50},
                                  TokenCounter(TokenScheme::Char4));
        std::vector<Embedding> embs;
        for (const auto& c : chunks) embs.push_back(hashed_embedding(c.text, 32));
        auto store = build_store(chunks, embs);
        store.save(path);
        auto back = VectorStore::load(path);
        REQUIRE(back.size() == store.size());
        CHECK(back.dim() == store.dim());
        for (std::size_t i = 0; i < store.size(); ++i) {
            CHECK(back.entries()[i].chunk_id == store.entries()[i].chunk_id);
            CHECK(back.entries()[i].text == store.entries()[i].text);
            CHECK(back.entries()[i].embedding == store.entries()[i].embedding);
        }
        auto q = hashed_embedding("assign data", 32);
        auto a = store.top_k(q, 5), b = back.top_k(q, 5);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].index == b[i].index);
    }
    std::ofstream(path) << "{\"dim\":2,\"count\":3,\"version\":1}\n";
    CHECK_THROWS_AS(VectorStore::load(path), IoError);
}
