#include "rtlrc/evaluate.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "rtlrc/error.hpp"

namespace rtlrc {

namespace {

std::string innermost_message(const std::exception& e) {
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        return innermost_message(inner);
    } catch (...) {
        return "unknown error";
    }
    return e.what();
}

}  // namespace

EvalRecord evaluate_sample(const RepoSample& sample, const Pipeline& pipeline,
                           const GenerationBackend& backend, const Buckets& buckets) {
    try {
        auto completion = pipeline.complete(backend, sample);
        const auto& a = completion.assembly;
        EvalRecord r = score_record(sample.id, std::move(completion.prediction), sample.target);
        r.context_tokens = a.direct_tokens;
        r.prompt_tokens = a.prompt_tokens;
        r.path_taken = std::string(to_string(a.path_taken));
        r.bucket = buckets.label_for(a.direct_tokens);
        r.file_truncated = a.file_truncated;
        if (a.retrieval) {
            r.query_truncated = a.retrieval->truncated_query;
            r.chunks_admitted = a.retrieval->chunks.size();
            r.chunks_total = a.retrieval->chunks_total;
            r.chunks_truncated = a.retrieval->truncated_chunks;
        }
        return r;
    } catch (const std::exception& e) {
        EvalRecord r;
        r.sample_id = sample.id;
        r.target = sample.target;
        r.error = innermost_message(e);
        return r;
    }
}

std::vector<EvalRecord> run_evaluation(const std::vector<const RepoSample*>& samples,
                                       const Pipeline& pipeline, const GenerationBackend& backend,
                                       const Buckets& buckets, std::size_t workers) {
    std::vector<EvalRecord> records(samples.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < samples.size(); i = next++)
            records[i] = evaluate_sample(*samples[i], pipeline, backend, buckets);
    };
    workers = std::max<std::size_t>(1, std::min(workers, samples.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
    }
    return records;
}

std::vector<const RepoSample*> filter_by_context(const Dataset& dataset, const Pipeline& pipeline,
                                                 std::size_t min_tokens) {
    std::vector<const RepoSample*> out;
    for (const auto& s : dataset.samples)
        if (min_tokens == 0 || pipeline.direct_tokens(s) >= min_tokens) out.push_back(&s);
    return out;
}

nlohmann::json describe_config(const PipelineConfig& config) {
    return {{"budget", config.budget},
            {"split", std::string(to_string(config.strategy.keyword))},
            {"chunk_size", config.strategy.chunk_size},
            {"embedder", config.embedder.describe()},
            {"tokenizer", config.counter.describe()},
            {"gate", config.gate_enabled},
            {"template", config.prompt_template},
            {"context_order", std::string(to_string(config.context_order))}};
}

}  // namespace rtlrc
