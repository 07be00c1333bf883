#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rtlrc {

struct RepoFile {
    std::string path;  // relative, non-empty
    std::string text;

    bool operator==(const RepoFile&) const = default;
};

// One benchmark instance: repository files, the incomplete current file and
// the human-written next line.
struct RepoSample {
    std::string id;
    std::string repo;
    std::vector<RepoFile> context_files;
    std::string current_path;
    std::string current_prefix;
    std::string target;  // no newline

    bool operator==(const RepoSample&) const = default;
};

struct Dataset {
    std::vector<RepoSample> samples;
    std::filesystem::path source_path;
    // Fields present in the input that the schema does not know about.
    std::size_t unknown_fields = 0;

    const RepoSample* find(std::string_view id) const;
};

// Parses one JSONL line. line_no is only used for error reporting.
RepoSample sample_from_json(const nlohmann::json& j, std::size_t line_no,
                            std::size_t* unknown_fields = nullptr);
nlohmann::json sample_to_json(const RepoSample& s);

// Throws MalformedLine, SchemaViolation, DuplicateId or IoError.
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<std::size_t> limit = std::nullopt);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// Cat(C_repo): "// File: <path>\n<text>\n\n" for each context file in order.
std::string concat_repo_context(const RepoSample& sample);

// 64-bit FNV-1a; used for dataset fingerprints and the hashing embedder.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t v);

// Fingerprint of a file's bytes; throws IoError.
std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace rtlrc
