#include <doctest.h>

#include <algorithm>

#include "rtlrc/retrieve.hpp"
#include "stub_server.hpp"
#include "synthetic.hpp"

using namespace rtlrc;

namespace {

RepoSample two_file_sample() {
    RepoSample s;
    s.id = "r";
    s.repo = "repo";
    s.context_files = {{"fifo.v", "module fifo; wire wr_ptr; wire rd_ptr; endmodule\n"},
                       {"uart.v", "module uart; wire baud_tick; wire tx_shift; endmodule\n"}};
    s.current_path = "top.v";
    s.current_prefix = "module top;\n  uart u (.baud_tick(t), .tx_shift(";
    s.target = "x";
    return s;
}

}  // namespace

TEST_CASE("render_retrieved_chunk adds the provenance header and a final newline") {
    CHECK(render_retrieved_chunk({"a\n", "x.v", 0, 1, false}) == "// Retrieved from: x.v\na\n");
    CHECK(render_retrieved_chunk({"a", "x.v", 0, 1, false}) == "// Retrieved from: x.v\na\n");
}

TEST_CASE("retrieval ranks the relevant file first") {
    TokenCounter wp(TokenScheme::WhitespacePunct);
    auto ctx = retrieve(two_file_sample(), {SplitKeyword::EndModule, 100}, EmbedderConfig::hashed(),
                        wp, 1000, {true, true});
    REQUIRE(ctx.chunks.size() >= 1);
    CHECK(ctx.chunks[0].chunk.source_path == "uart.v");
    CHECK(ctx.chunks_total == ctx.ranking.size() + 0);
    CHECK_FALSE(ctx.truncated_query);
}

TEST_CASE("admission stops at the first chunk that does not fit") {
    TokenCounter wp(TokenScheme::WhitespacePunct);
    RepoSample s = two_file_sample();
    auto full = retrieve(s, {SplitKeyword::EndModule, 100}, EmbedderConfig::hashed(), wp, 10000,
                         {true, true});
    REQUIRE(full.ranking.size() >= 2);
    const std::size_t first = full.ranking[0].cost;

    auto ctx = retrieve(s, {SplitKeyword::EndModule, 100}, EmbedderConfig::hashed(), wp, first,
                        {true, true});
    CHECK(ctx.chunks.size() == 1);
    CHECK(ctx.total_tokens == first);
    CHECK(ctx.ranking.size() == full.ranking.size());
    CHECK_FALSE(ctx.ranking[1].admitted);

    auto none = retrieve(s, {SplitKeyword::EndModule, 100}, EmbedderConfig::hashed(), wp, first - 1);
    CHECK(none.chunks.empty());
    CHECK(none.total_tokens == 0);
}

TEST_CASE("property: admitted chunks are a prefix of the ranking within budget") {
    testing::Rng rng(51);
    TokenCounter wp(TokenScheme::WhitespacePunct);
    for (int trial = 0; trial < 40; ++trial) {
        auto s = testing::random_sample(rng, "p", {1, 4, 200, 3000, 1, 20});
        std::size_t budget = testing::uniform(rng, 0, 1500);
        SplitStrategy st{static_cast<SplitKeyword>(testing::uniform(rng, 0, 2)),
                         testing::uniform(rng, 20, 400)};
        auto ctx = retrieve(s, st, EmbedderConfig::hashed(), wp, budget, {true, true});
        CHECK(ctx.total_tokens <= budget);
        std::size_t sum = 0;
        for (std::size_t i = 0; i < ctx.chunks.size(); ++i) {
            CHECK(ctx.chunks[i].chunk == ctx.ranking[i].chunk);
            CHECK(ctx.ranking[i].admitted);
            CHECK(ctx.chunks[i].cost == wp.count(render_retrieved_chunk(ctx.chunks[i].chunk)));
            sum += ctx.chunks[i].cost;
        }
        CHECK(sum == ctx.total_tokens);
        if (ctx.chunks.size() < ctx.ranking.size())
            CHECK(ctx.total_tokens + ctx.ranking[ctx.chunks.size()].cost > budget);
        for (std::size_t i = 1; i < ctx.ranking.size(); ++i)
            CHECK(ctx.ranking[i - 1].score >= ctx.ranking[i].score);
    }
}

TEST_CASE("over-window query keeps its tail") {
    testing::StubServer server(testing::hashing_embed_service(64));
    TokenCounter c4(TokenScheme::Char4);
    RepoSample s = two_file_sample();
    s.current_prefix = std::string(400, 'q') + "\n  uart u (.baud_tick(t));\n";
    auto ctx = retrieve(s, {SplitKeyword::EndModule, 100},
                        EmbedderConfig::http(server.url("/e"), "m", 16), c4, 1000);
    CHECK(ctx.truncated_query);
    auto reqs = server.requests();
    REQUIRE(!reqs.empty());
    const auto sent = reqs.back().at("input").at(0).get<std::string>();
    CHECK(c4.count(sent) <= 16);
    CHECK(s.current_prefix.ends_with(sent));
}
