#include "rtlrc/split.hpp"

#include "rtlrc/error.hpp"

namespace rtlrc {

namespace {

constexpr std::string_view kEndModule = "endmodule";

bool is_ident_byte(char c) {
    return is_word_byte(static_cast<unsigned char>(c)) || c == '$';
}

// Offsets just past each separator occurrence.
std::vector<std::size_t> cut_points(std::string_view text, SplitKeyword keyword) {
    std::vector<std::size_t> cuts;
    switch (keyword) {
        case SplitKeyword::LineBreak:
            for (std::size_t i = 0; i < text.size(); ++i)
                if (text[i] == '\n') cuts.push_back(i + 1);
            break;
        case SplitKeyword::DoubleBreak:
            for (std::size_t i = text.find("\n\n"); i != std::string_view::npos;
                 i = text.find("\n\n", i + 2))
                cuts.push_back(i + 2);
            break;
        case SplitKeyword::EndModule:
            for (std::size_t i = text.find(kEndModule); i != std::string_view::npos;
                 i = text.find(kEndModule, i + 1)) {
                std::size_t end = i + kEndModule.size();
                bool word_start = i == 0 || !is_ident_byte(text[i - 1]);
                bool word_end = end == text.size() || !is_ident_byte(text[end]);
                if (word_start && word_end) cuts.push_back(end);
            }
            break;
    }
    return cuts;
}

}  // namespace

SplitKeyword parse_split_keyword(std::string_view name) {
    if (name == "line") return SplitKeyword::LineBreak;
    if (name == "endmodule") return SplitKeyword::EndModule;
    if (name == "para") return SplitKeyword::DoubleBreak;
    throw ConfigError("unknown split keyword '" + std::string(name) +
                      "' (expected line|endmodule|para)");
}

std::string_view to_string(SplitKeyword k) {
    switch (k) {
        case SplitKeyword::LineBreak: return "line";
        case SplitKeyword::EndModule: return "endmodule";
        case SplitKeyword::DoubleBreak: return "para";
    }
    return "?";
}

std::vector<std::string_view> split_pieces(std::string_view text, SplitKeyword keyword) {
    std::vector<std::string_view> pieces;
    std::size_t start = 0;
    for (std::size_t cut : cut_points(text, keyword)) {
        pieces.push_back(text.substr(start, cut - start));
        start = cut;
    }
    if (start < text.size()) pieces.push_back(text.substr(start));
    return pieces;
}

std::vector<std::string> split_pieces(const RepoFile& file, const SplitStrategy& strategy) {
    auto views = split_pieces(std::string_view(file.text), strategy.keyword);
    return {views.begin(), views.end()};
}

std::vector<Chunk> make_chunks(const std::vector<RepoFile>& files, const SplitStrategy& strategy,
                               const TokenCounter& counter) {
    if (strategy.chunk_size == 0) throw ConfigError("chunk_size must be >= 1");

    std::vector<Chunk> chunks;
    std::size_t ordinal = 0;
    for (const auto& file : files) {
        const std::string_view text = file.text;
        std::size_t begin = 0, end = 0, tokens = 0;

        auto flush = [&](bool oversize) {
            if (end == begin) return;
            chunks.push_back(Chunk{std::string(text.substr(begin, end - begin)), file.path,
                                   ordinal++, tokens, oversize});
            begin = end;
            tokens = 0;
        };

        for (std::string_view piece : split_pieces(text, strategy.keyword)) {
            const std::string_view current = text.substr(begin, end - begin);
            const std::size_t joined = counter.count_joined(current, tokens, piece);
            if (joined <= strategy.chunk_size) {
                end += piece.size();
                tokens = joined;
                continue;
            }
            flush(false);
            const std::size_t alone = counter.count(piece);
            end += piece.size();
            tokens = alone;
            if (alone > strategy.chunk_size) flush(true);
        }
        flush(false);
    }
    return chunks;
}

}  // namespace rtlrc
