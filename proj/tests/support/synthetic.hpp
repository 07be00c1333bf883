#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "rtlrc/corpus.hpp"

namespace rtlrc::testing {

using Rng = std::mt19937_64;

// Identifiers shared by every synthetic module; distinctive content is built
// from tag() instead.
const std::vector<std::string>& common_vocab();

std::string pick(Rng& rng, const std::vector<std::string>& v);
std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive

// Lowercase tag of n letters, e.g. for distinctive identifiers.
std::string tag(Rng& rng, std::size_t n = 6);

// One statement line ending in '\n' drawn from the common vocabulary.
std::string random_statement(Rng& rng);

// module ... endmodule with roughly `lines` body lines.
std::string random_module(Rng& rng, const std::string& name, std::size_t lines);

// Verilog-like file of about `target_bytes` bytes: several modules, comments,
// irregular blank-line runs, an optional trailing fragment after the last
// endmodule, and occasional identifiers that merely contain "endmodule".
std::string random_verilog_file(Rng& rng, std::size_t target_bytes);

struct SampleShape {
    std::size_t min_files = 0;
    std::size_t max_files = 4;
    std::size_t min_file_bytes = 200;
    std::size_t max_file_bytes = 4000;
    std::size_t min_prefix_lines = 1;
    std::size_t max_prefix_lines = 40;
};

RepoSample random_sample(Rng& rng, const std::string& id, const SampleShape& shape = {});

Dataset random_dataset(Rng& rng, std::size_t n, const SampleShape& shape = {});

// Repository with one golden file whose module carries distinctive
// identifiers that the current file also uses.
struct GoldenRepo {
    RepoSample sample;
    std::string golden_path;
    std::vector<std::string> distinctive;
};

struct GoldenShape {
    std::size_t distractors = 7;
    std::size_t distractor_lines = 300;
    std::size_t golden_lines = 120;
    // Lines of generic filler before the golden module's distinctive part;
    // used to push identifiers past an embedding window.
    std::size_t filler_lines = 0;
};

GoldenRepo golden_repo(Rng& rng, const std::string& id, const GoldenShape& shape = {});

// Small mixed-length dataset: some samples far under 10k tokens, some over.
Dataset mixed_length_dataset(Rng& rng, std::size_t n);

}  // namespace rtlrc::testing
