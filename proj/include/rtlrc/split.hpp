#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rtlrc/corpus.hpp"
#include "rtlrc/tokenize.hpp"

namespace rtlrc {

enum class SplitKeyword {
    LineBreak,    // "\n"
    EndModule,    // "endmodule"
    DoubleBreak,  // "\n\n"
};

SplitKeyword parse_split_keyword(std::string_view name);  // line | endmodule | para
std::string_view to_string(SplitKeyword k);

struct SplitStrategy {
    SplitKeyword keyword = SplitKeyword::LineBreak;
    std::size_t chunk_size = 4096;  // tokens, >= 1
};

struct Chunk {
    std::string text;
    std::string source_path;
    std::size_t ordinal = 0;
    std::size_t token_len = 0;
    // Single piece longer than chunk_size, kept whole.
    bool oversize = false;

    std::string id() const { return source_path + "#" + std::to_string(ordinal); }
    bool operator==(const Chunk&) const = default;
};

// Partitions text at the keyword; the separator stays with the preceding
// piece, so concatenating the pieces reproduces the text exactly.
std::vector<std::string_view> split_pieces(std::string_view text, SplitKeyword keyword);
std::vector<std::string> split_pieces(const RepoFile& file, const SplitStrategy& strategy);

// Greedy in-order merge of each file's pieces into chunks of at most
// chunk_size tokens. Chunks never span files; ordinals run from 0 across the
// whole call.
std::vector<Chunk> make_chunks(const std::vector<RepoFile>& files, const SplitStrategy& strategy,
                               const TokenCounter& counter);

}  // namespace rtlrc
