#include "rtlrc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "rtlrc/error.hpp"

namespace rtlrc {

using nlohmann::json;

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

double similarity(std::string_view a, std::string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 100.0;
    return 100.0 * (1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest));
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

std::string normalize_line(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ws(s[b])) ++b;
    while (e > b && is_ws(s[e - 1])) --e;
    std::string out;
    out.reserve(e - b);
    bool in_run = false;
    for (std::size_t i = b; i < e; ++i) {
        char c = s[i];
        if (c == ' ' || c == '\t') {
            if (!in_run) out += ' ';
            in_run = true;
        } else {
            out += c;
            in_run = false;
        }
    }
    return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    if (b.empty()) return a.size();
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

int exact_match(std::string_view prediction, std::string_view target) {
    return normalize_line(prediction) == normalize_line(target) ? 1 : 0;
}

double edit_similarity(std::string_view prediction, std::string_view target) {
    return similarity(normalize_line(prediction), normalize_line(target));
}

int exact_match_raw(std::string_view prediction, std::string_view target) {
    return prediction == target ? 1 : 0;
}

double edit_similarity_raw(std::string_view prediction, std::string_view target) {
    return similarity(prediction, target);
}

EvalRecord score_record(std::string sample_id, std::string prediction, std::string target) {
    EvalRecord r;
    r.em = exact_match(prediction, target);
    r.es = edit_similarity(prediction, target);
    r.em_raw = exact_match_raw(prediction, target);
    r.es_raw = edit_similarity_raw(prediction, target);
    r.sample_id = std::move(sample_id);
    r.prediction = std::move(prediction);
    r.target = std::move(target);
    return r;
}

json to_json(const EvalRecord& r) {
    return {{"sample_id", r.sample_id},
            {"prediction", r.prediction},
            {"target", r.target},
            {"em", r.em},
            {"es", r.es},
            {"em_raw", r.em_raw},
            {"es_raw", r.es_raw},
            {"context_tokens", r.context_tokens},
            {"prompt_tokens", r.prompt_tokens},
            {"path_taken", r.path_taken},
            {"bucket", r.bucket},
            {"file_truncated", r.file_truncated},
            {"query_truncated", r.query_truncated},
            {"chunks_admitted", r.chunks_admitted},
            {"chunks_total", r.chunks_total},
            {"chunks_truncated", r.chunks_truncated},
            {"error", r.error ? json(*r.error) : json(nullptr)}};
}

EvalRecord record_from_json(const json& j) {
    EvalRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.prediction = j.at("prediction").get<std::string>();
    r.target = j.at("target").get<std::string>();
    r.em = j.at("em").get<int>();
    r.es = j.at("es").get<double>();
    r.em_raw = j.at("em_raw").get<int>();
    r.es_raw = j.at("es_raw").get<double>();
    r.context_tokens = j.at("context_tokens").get<std::size_t>();
    r.prompt_tokens = j.at("prompt_tokens").get<std::size_t>();
    r.path_taken = j.at("path_taken").get<std::string>();
    r.bucket = j.at("bucket").get<std::string>();
    r.file_truncated = j.at("file_truncated").get<bool>();
    r.query_truncated = j.at("query_truncated").get<bool>();
    r.chunks_admitted = j.at("chunks_admitted").get<std::size_t>();
    r.chunks_total = j.at("chunks_total").get<std::size_t>();
    r.chunks_truncated = j.at("chunks_truncated").get<std::size_t>();
    if (const auto& e = j.at("error"); !e.is_null()) r.error = e.get<std::string>();
    return r;
}

Buckets::Buckets(std::vector<std::size_t> thresholds) : thresholds_(std::move(thresholds)) {
    for (std::size_t i = 1; i < thresholds_.size(); ++i)
        if (thresholds_[i] <= thresholds_[i - 1])
            throw ConfigError("bucket thresholds must be strictly increasing");
}

std::size_t Buckets::index_of(std::size_t tokens) const {
    return static_cast<std::size_t>(
        std::upper_bound(thresholds_.begin(), thresholds_.end(), tokens) - thresholds_.begin());
}

std::string Buckets::label(std::size_t index) const {
    if (thresholds_.empty()) return "all";
    if (index == 0) return "<" + std::to_string(thresholds_.front());
    if (index >= thresholds_.size()) return ">=" + std::to_string(thresholds_.back());
    return std::to_string(thresholds_[index - 1]) + "-" + std::to_string(thresholds_[index]);
}

EvalSummary summarize(const std::vector<EvalRecord>& records, const Buckets& buckets) {
    EvalSummary s;
    std::vector<double> em(buckets.size(), 0.0), es(buckets.size(), 0.0);
    std::vector<std::size_t> n(buckets.size(), 0);
    double em_sum = 0.0, es_sum = 0.0, em_raw_sum = 0.0, es_raw_sum = 0.0;

    for (const auto& r : records) {
        if (!r.ok()) {
            ++s.n_errors;
            continue;
        }
        ++s.n;
        em_sum += r.em;
        es_sum += r.es;
        em_raw_sum += r.em_raw;
        es_raw_sum += r.es_raw;
        if (r.path_taken == "direct") ++s.n_direct;
        if (r.path_taken == "rag") ++s.n_rag;
        std::size_t b = buckets.index_of(r.context_tokens);
        ++n[b];
        em[b] += r.em;
        es[b] += r.es;
    }
    if (s.n > 0) {
        const double count = static_cast<double>(s.n);
        s.em_pct = 100.0 * em_sum / count;
        s.es_mean = es_sum / count;
        s.em_raw_pct = 100.0 * em_raw_sum / count;
        s.es_raw_mean = es_raw_sum / count;
    }
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        BucketSummary bs{buckets.label(b), n[b], 0.0, 0.0};
        if (n[b] > 0) {
            bs.em_pct = 100.0 * em[b] / static_cast<double>(n[b]);
            bs.es_mean = es[b] / static_cast<double>(n[b]);
        }
        s.per_bucket.push_back(std::move(bs));
    }
    return s;
}

json to_json(const EvalSummary& s) {
    json buckets = json::array();
    for (const auto& b : s.per_bucket)
        buckets.push_back({{"bucket", b.bucket}, {"n", b.n}, {"em_pct", b.em_pct},
                           {"es_mean", b.es_mean}});
    return {{"n", s.n},
            {"n_errors", s.n_errors},
            {"em_pct", s.em_pct},
            {"es_mean", s.es_mean},
            {"em_raw_pct", s.em_raw_pct},
            {"es_raw_mean", s.es_raw_mean},
            {"n_direct", s.n_direct},
            {"n_rag", s.n_rag},
            {"per_bucket", std::move(buckets)},
            {"config", s.config}};
}

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_records_jsonl(const std::vector<EvalRecord>& records, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& r : records) out << to_json(r).dump() << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<EvalRecord> read_records_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<EvalRecord> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(record_from_json(json::parse(line)));
    return out;
}

void write_summary_json(const EvalSummary& s, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << to_json(s).dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_summary_csv(const EvalSummary& s, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "bucket,n,em_pct,es_mean\n";
    for (const auto& b : s.per_bucket)
        out << b.bucket << ',' << b.n << ',' << format_fixed(b.em_pct) << ','
            << format_fixed(b.es_mean) << '\n';
    out << "TOTAL," << s.n << ',' << format_fixed(s.em_pct) << ',' << format_fixed(s.es_mean)
        << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace rtlrc
