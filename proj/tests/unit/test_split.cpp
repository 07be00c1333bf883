#include <doctest.h>

#include <string>
#include <vector>

#include "rtlrc/error.hpp"
#include "rtlrc/split.hpp"
#include "synthetic.hpp"

using namespace rtlrc;

namespace {

std::vector<std::string> strings(const std::vector<std::string_view>& v) {
    return {v.begin(), v.end()};
}

std::string join(const std::vector<std::string_view>& v) {
    std::string s;
    for (auto p : v) s += p;
    return s;
}

}  // namespace

TEST_CASE("split_pieces keeps the separator with the preceding piece") {
    using V = std::vector<std::string>;
    CHECK(strings(split_pieces("a\nb\nc", SplitKeyword::LineBreak)) == V{"a\n", "b\n", "c"});
    CHECK(strings(split_pieces("a\nb\n", SplitKeyword::LineBreak)) == V{"a\n", "b\n"});
    CHECK(strings(split_pieces("a\n\nb\n\n\nc", SplitKeyword::DoubleBreak)) ==
          V{"a\n\n", "b\n\n", "\nc"});
    CHECK(strings(split_pieces("module a; endmodule\nmodule b; endmodule\n", SplitKeyword::EndModule)) ==
          V{"module a; endmodule", "\nmodule b; endmodule", "\n"});
    CHECK(split_pieces("", SplitKeyword::LineBreak).empty());
}

TEST_CASE("endmodule only matches as a whole word") {
    using V = std::vector<std::string>;
    CHECK(strings(split_pieces("wire endmodule_flag; endmodule x", SplitKeyword::EndModule)) ==
          V{"wire endmodule_flag; endmodule", " x"});
    CHECK(strings(split_pieces("my_endmodule $endmodule", SplitKeyword::EndModule)) ==
          V{"my_endmodule $endmodule"});
    CHECK(strings(split_pieces("endmodule", SplitKeyword::EndModule)) == V{"endmodule"});
}

TEST_CASE("make_chunks merges pieces greedily up to chunk_size") {
    TokenCounter wp(TokenScheme::WhitespacePunct);
    std::string text;
    for (char c = 'a'; c < 'a' + 10; ++c) text += std::string(1, c) + "\n";
    auto chunks = make_chunks({{"f.v", text}}, {SplitKeyword::LineBreak, 4}, wp);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].text == "a\nb\nc\nd\n");
    CHECK(chunks[0].token_len == 4);
    CHECK(chunks[1].token_len == 4);
    CHECK(chunks[2].text == "i\nj\n");
    CHECK(chunks[2].token_len == 2);
    CHECK(chunks[2].id() == "f.v#2");
}

TEST_CASE("oversize pieces are kept whole and flagged") {
    TokenCounter wp(TokenScheme::WhitespacePunct);
    auto chunks = make_chunks({{"f.v", "a\nb c d e f\ng\n"}}, {SplitKeyword::LineBreak, 2}, wp);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].text == "a\n");
    CHECK_FALSE(chunks[0].oversize);
    CHECK(chunks[1].text == "b c d e f\n");
    CHECK(chunks[1].oversize);
    CHECK(chunks[1].token_len == 5);
    CHECK(chunks[2].text == "g\n");
}

TEST_CASE("chunks never span files and ordinals are global") {
    TokenCounter c4(TokenScheme::Char4);
    auto chunks = make_chunks({{"a.v", "x\n"}, {"b.v", ""}, {"c.v", "y\n"}},
                              {SplitKeyword::LineBreak, 100}, c4);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].id() == "a.v#0");
    CHECK(chunks[1].id() == "c.v#1");
    CHECK_THROWS_AS(make_chunks({}, {SplitKeyword::LineBreak, 0}, c4), ConfigError);
}

TEST_CASE("property: pieces and chunks reproduce each file exactly") {
    testing::Rng rng(21);
    TokenCounter c4(TokenScheme::Char4), wp(TokenScheme::WhitespacePunct);
    for (int trial = 0; trial < 60; ++trial) {
        auto text = testing::random_verilog_file(rng, testing::uniform(rng, 0, 3000));
        for (auto kw : {SplitKeyword::LineBreak, SplitKeyword::EndModule, SplitKeyword::DoubleBreak}) {
            auto pieces = split_pieces(text, kw);
            REQUIRE(join(pieces) == text);
            for (auto p : pieces) CHECK(!p.empty());

            for (const auto* counter : {&c4, &wp}) {
                std::size_t size = testing::uniform(rng, 1, 400);
                auto chunks = make_chunks({{"f.v", text}}, {kw, size}, *counter);
                std::string joined;
                for (std::size_t i = 0; i < chunks.size(); ++i) {
                    const auto& c = chunks[i];
                    joined += c.text;
                    CHECK(c.ordinal == i);
                    CHECK(c.token_len == counter->count(c.text));
                    if (!c.oversize) CHECK(c.token_len <= size);
                    else CHECK(split_pieces(c.text, kw).size() == 1);
                }
                CHECK(joined == text);
            }
        }
    }
}

TEST_CASE("property: a larger chunk_size never yields more chunks") {
    testing::Rng rng(22);
    TokenCounter wp(TokenScheme::WhitespacePunct);
    for (int trial = 0; trial < 40; ++trial) {
        auto text = testing::random_verilog_file(rng, 2000);
        std::size_t small = testing::uniform(rng, 1, 200);
        std::size_t big = small + testing::uniform(rng, 0, 200);
        auto a = make_chunks({{"f.v", text}}, {SplitKeyword::LineBreak, small}, wp);
        auto b = make_chunks({{"f.v", text}}, {SplitKeyword::LineBreak, big}, wp);
        CHECK(b.size() <= a.size());
    }
}

TEST_CASE("split keyword names") {
    CHECK(parse_split_keyword("line") == SplitKeyword::LineBreak);
    CHECK(parse_split_keyword("endmodule") == SplitKeyword::EndModule);
    CHECK(parse_split_keyword("para") == SplitKeyword::DoubleBreak);
    CHECK_THROWS_AS(parse_split_keyword("module"), ConfigError);
}
