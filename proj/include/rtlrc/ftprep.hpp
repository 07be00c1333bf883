#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rtlrc/corpus.hpp"
#include "rtlrc/pipeline.hpp"

namespace rtlrc {

// One instruction-tuning pair. The input holds the conditioning context and
// the output the label line, kept apart so a trainer can mask the input.
struct FtSample {
    std::string input;
    std::string output;
    std::string sample_id;
    bool truncated = false;
    std::size_t input_tokens = 0;
    std::size_t dropped_files = 0;

    bool operator==(const FtSample&) const = default;
};

struct FtSkip {
    std::string sample_id;
    std::string reason;
};

struct FtResult {
    std::vector<FtSample> samples;
    std::vector<FtSkip> skipped;
};

// Renders every sample with the direct-path template. Over-budget samples
// lose whole context files from the front; if C_file alone still overflows,
// its trailing lines are kept.
FtResult prepare_ft_dataset(const Dataset& dataset, const PipelineConfig& config,
                            std::size_t budget = 10240);

// Seeded uniform sampling without replacement; file order is preserved.
Dataset sample_subset(const Dataset& dataset, std::size_t limit, std::uint64_t seed);

// Throws IoError when the file exists and force is false, or on write failure.
void export_jsonl(const std::vector<FtSample>& samples, const std::filesystem::path& path,
                  bool force = false);
std::vector<FtSample> load_ft_jsonl(const std::filesystem::path& path);

}  // namespace rtlrc
