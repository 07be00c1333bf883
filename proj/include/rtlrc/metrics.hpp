#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rtlrc {

// Trims leading/trailing whitespace and collapses internal runs of spaces and
// tabs to one space.
std::string normalize_line(std::string_view s);

// Unit-cost character Levenshtein distance (two-row DP).
std::size_t levenshtein(std::string_view a, std::string_view b);

int exact_match(std::string_view prediction, std::string_view target);
double edit_similarity(std::string_view prediction, std::string_view target);

// Same metrics without normalization.
int exact_match_raw(std::string_view prediction, std::string_view target);
double edit_similarity_raw(std::string_view prediction, std::string_view target);

struct EvalRecord {
    std::string sample_id;
    std::string prediction;
    std::string target;
    int em = 0;
    double es = 0.0;
    int em_raw = 0;
    double es_raw = 0.0;
    std::size_t context_tokens = 0;
    std::size_t prompt_tokens = 0;
    std::string path_taken;  // "direct" | "rag" | "" on error
    std::string bucket;
    bool file_truncated = false;
    bool query_truncated = false;
    std::size_t chunks_admitted = 0;
    std::size_t chunks_total = 0;
    std::size_t chunks_truncated = 0;
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
};

nlohmann::json to_json(const EvalRecord& r);
EvalRecord record_from_json(const nlohmann::json& j);

// Scores a prediction against a target and fills the metric fields.
EvalRecord score_record(std::string sample_id, std::string prediction, std::string target);

// Half-open buckets over strictly increasing thresholds:
// [0,t0), [t0,t1), ..., [tn,inf), labelled "<t0", "t0-t1", ..., ">=tn".
class Buckets {
public:
    explicit Buckets(std::vector<std::size_t> thresholds = {5000, 10000, 20000, 40000});
    std::size_t size() const noexcept { return thresholds_.size() + 1; }
    std::size_t index_of(std::size_t tokens) const;
    std::string label(std::size_t index) const;
    std::string label_for(std::size_t tokens) const { return label(index_of(tokens)); }
    const std::vector<std::size_t>& thresholds() const noexcept { return thresholds_; }

private:
    std::vector<std::size_t> thresholds_;
};

struct BucketSummary {
    std::string bucket;
    std::size_t n = 0;
    double em_pct = 0.0;
    double es_mean = 0.0;
};

struct EvalSummary {
    std::size_t n = 0;  // scored records; error records are counted in n_errors
    std::size_t n_errors = 0;
    double em_pct = 0.0;
    double es_mean = 0.0;
    double em_raw_pct = 0.0;
    double es_raw_mean = 0.0;
    std::size_t n_direct = 0;
    std::size_t n_rag = 0;
    std::vector<BucketSummary> per_bucket;
    nlohmann::json config = nlohmann::json::object();
};

EvalSummary summarize(const std::vector<EvalRecord>& records, const Buckets& buckets = Buckets{});

nlohmann::json to_json(const EvalSummary& s);

void write_records_jsonl(const std::vector<EvalRecord>& records, const std::filesystem::path& path);
std::vector<EvalRecord> read_records_jsonl(const std::filesystem::path& path);
void write_summary_json(const EvalSummary& s, const std::filesystem::path& path);
void write_summary_csv(const EvalSummary& s, const std::filesystem::path& path);

// Fixed 6-decimal rendering used in CSV reports.
std::string format_fixed(double v);

}  // namespace rtlrc
