#include "rtlrc/retrieve.hpp"

#include "rtlrc/store.hpp"

namespace rtlrc {

std::string render_retrieved_chunk(const Chunk& chunk) {
    std::string out;
    out.reserve(chunk.text.size() + chunk.source_path.size() + 22);
    out += "// Retrieved from: ";
    out += chunk.source_path;
    out += '\n';
    out += chunk.text;
    if (out.back() != '\n') out += '\n';
    return out;
}

RetrievedContext retrieve(const RepoSample& sample, const SplitStrategy& strategy,
                          const Embedder& embedder, std::size_t budget,
                          const RetrieveOptions& opts) {
    RetrievedContext ctx;
    ctx.budget = budget;
    if (budget == 0 && !opts.keep_ranking) return ctx;

    const TokenCounter& counter = embedder.counter();
    std::vector<Chunk> chunks = make_chunks(sample.context_files, strategy, counter);
    ctx.chunks_total = chunks.size();
    if (chunks.empty()) return ctx;

    std::vector<std::string_view> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.emplace_back(c.text);
    VectorStore store = build_store(chunks, embedder.embed_batch(texts));
    if (std::size_t window = embedder.config().max_input_tokens; window > 0)
        for (const auto& c : chunks) ctx.truncated_chunks += c.token_len > window ? 1 : 0;

    // The end of C_file is what the next line depends on, so an over-window
    // query keeps its tail.
    std::string_view query = sample.current_prefix;
    if (std::size_t window = embedder.config().max_input_tokens;
        window > 0 && counter.count(query) > window) {
        query = counter.tail(query, window);
        ctx.truncated_query = true;
    }
    const auto hits = store.top_k(embedder.embed(query), store.size());

    bool open = true;
    for (const auto& hit : hits) {
        RankedChunk rc{chunks[hit.index], hit.score, 0, false};
        if (open) {
            rc.cost = opts.charge_headers ? counter.count(render_retrieved_chunk(rc.chunk))
                                          : rc.chunk.token_len;
            if (ctx.total_tokens + rc.cost <= budget) {
                rc.admitted = true;
                ctx.total_tokens += rc.cost;
                ctx.chunks.push_back(rc);
            } else {
                open = false;  // stop at the first misfit
            }
        }
        if (!opts.keep_ranking && !open) break;
        if (opts.keep_ranking) ctx.ranking.push_back(std::move(rc));
    }
    return ctx;
}

RetrievedContext retrieve(const RepoSample& sample, const SplitStrategy& strategy,
                          const EmbedderConfig& embedder, const TokenCounter& counter,
                          std::size_t budget, const RetrieveOptions& opts) {
    return retrieve(sample, strategy, Embedder(embedder, counter), budget, opts);
}

}  // namespace rtlrc
