#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rtlrc/corpus.hpp"
#include "rtlrc/embed.hpp"
#include "rtlrc/split.hpp"
#include "rtlrc/tokenize.hpp"

namespace rtlrc {

struct RankedChunk {
    Chunk chunk;
    double score = 0.0;
    // Tokens charged against the budget (chunk plus its provenance header).
    std::size_t cost = 0;
    bool admitted = false;
};

// C_retr: the admitted chunks in descending relevance, always a prefix of the
// full ranking.
struct RetrievedContext {
    std::vector<RankedChunk> chunks;
    std::size_t total_tokens = 0;
    std::size_t budget = 0;
    bool truncated_query = false;
    // Every ranked candidate, admitted or not. Kept for inspection.
    std::vector<RankedChunk> ranking;
    std::size_t chunks_total = 0;
    // Chunks that did not fit the embedding window.
    std::size_t truncated_chunks = 0;
};

struct RetrieveOptions {
    // Charge each chunk's "// Retrieved from:" header against the budget.
    bool charge_headers = true;
    bool keep_ranking = false;
};

// "// Retrieved from: <path>\n<text>" with a newline appended when the chunk
// does not end with one.
std::string render_retrieved_chunk(const Chunk& chunk);

RetrievedContext retrieve(const RepoSample& sample, const SplitStrategy& strategy,
                          const Embedder& embedder, std::size_t budget,
                          const RetrieveOptions& opts = {});

RetrievedContext retrieve(const RepoSample& sample, const SplitStrategy& strategy,
                          const EmbedderConfig& embedder, const TokenCounter& counter,
                          std::size_t budget, const RetrieveOptions& opts = {});

}  // namespace rtlrc
