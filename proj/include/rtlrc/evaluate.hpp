#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "rtlrc/backend.hpp"
#include "rtlrc/corpus.hpp"
#include "rtlrc/metrics.hpp"
#include "rtlrc/pipeline.hpp"

namespace rtlrc {

// Runs the pipeline over every sample with a pool of workers. Records come
// back in dataset order whatever the completion order; a failing sample
// yields an error record and leaves the others untouched.
std::vector<EvalRecord> run_evaluation(const std::vector<const RepoSample*>& samples,
                                       const Pipeline& pipeline, const GenerationBackend& backend,
                                       const Buckets& buckets, std::size_t workers);

// Single-sample step of run_evaluation.
EvalRecord evaluate_sample(const RepoSample& sample, const Pipeline& pipeline,
                           const GenerationBackend& backend, const Buckets& buckets);

// Samples whose rendered direct prompt has at least min_tokens tokens.
std::vector<const RepoSample*> filter_by_context(const Dataset& dataset, const Pipeline& pipeline,
                                                 std::size_t min_tokens);

nlohmann::json describe_config(const PipelineConfig& config);

}  // namespace rtlrc
