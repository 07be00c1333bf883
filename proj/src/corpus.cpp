#include "rtlrc/corpus.hpp"

#include <array>
#include <fstream>
#include <unordered_set>

#include "rtlrc/error.hpp"

namespace rtlrc {

using nlohmann::json;

namespace {

const std::string& require_string(const json& j, const char* field, std::size_t line_no) {
    auto it = j.find(field);
    if (it == j.end()) throw SchemaViolation(line_no, field, "missing");
    if (!it->is_string()) throw SchemaViolation(line_no, field, "expected string");
    return it->get_ref<const std::string&>();
}

void check_relative(const std::string& path, const char* field, std::size_t line_no) {
    if (path.empty()) throw SchemaViolation(line_no, field, "empty path");
    if (path.front() == '/' || path.front() == '\\')
        throw SchemaViolation(line_no, field, "path must be relative");
}

constexpr std::array<const char*, 6> kKnownFields = {
    "id", "repo", "context_files", "current_path", "current_prefix", "target"};

}  // namespace

const RepoSample* Dataset::find(std::string_view id) const {
    for (const auto& s : samples)
        if (s.id == id) return &s;
    return nullptr;
}

RepoSample sample_from_json(const json& j, std::size_t line_no, std::size_t* unknown_fields) {
    if (!j.is_object()) throw SchemaViolation(line_no, "<root>", "expected object");

    RepoSample s;
    s.id = require_string(j, "id", line_no);
    if (s.id.empty()) throw SchemaViolation(line_no, "id", "empty id");
    s.repo = require_string(j, "repo", line_no);
    s.current_path = require_string(j, "current_path", line_no);
    check_relative(s.current_path, "current_path", line_no);
    s.current_prefix = require_string(j, "current_prefix", line_no);
    s.target = require_string(j, "target", line_no);
    if (s.target.find('\n') != std::string::npos)
        throw SchemaViolation(line_no, "target", "target contains a newline");

    auto files = j.find("context_files");
    if (files == j.end()) throw SchemaViolation(line_no, "context_files", "missing");
    if (!files->is_array()) throw SchemaViolation(line_no, "context_files", "expected array");
    s.context_files.reserve(files->size());
    for (const auto& f : *files) {
        if (!f.is_object()) throw SchemaViolation(line_no, "context_files", "expected object entry");
        RepoFile rf;
        rf.path = require_string(f, "path", line_no);
        check_relative(rf.path, "context_files.path", line_no);
        rf.text = require_string(f, "text", line_no);
        s.context_files.push_back(std::move(rf));
    }
    if (s.context_files.empty() && s.current_prefix.empty())
        throw SchemaViolation(line_no, "context_files", "sample has no context at all");

    if (unknown_fields) {
        for (const auto& [key, _] : j.items()) {
            bool known = false;
            for (const char* k : kKnownFields) known = known || key == k;
            if (!known) ++*unknown_fields;
        }
    }
    return s;
}

json sample_to_json(const RepoSample& s) {
    json files = json::array();
    for (const auto& f : s.context_files) files.push_back({{"path", f.path}, {"text", f.text}});
    return {{"id", s.id},
            {"repo", s.repo},
            {"context_files", std::move(files)},
            {"current_path", s.current_path},
            {"current_prefix", s.current_prefix},
            {"target", s.target}};
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<std::size_t> limit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset '" + path.string() + "'");

    Dataset ds;
    ds.source_path = path;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while ((!limit || ds.samples.size() < *limit) && std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedLine(line_no, e.what());
        }
        RepoSample s = sample_from_json(j, line_no, &ds.unknown_fields);
        if (!seen.insert(s.id).second) throw DuplicateId(s.id);
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    for (const auto& s : ds.samples) out << sample_to_json(s).dump() << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string concat_repo_context(const RepoSample& sample) {
    std::size_t total = 0;
    for (const auto& f : sample.context_files) total += f.path.size() + f.text.size() + 12;
    std::string out;
    out.reserve(total);
    for (const auto& f : sample.context_files) {
        out += "// File: ";
        out += f.path;
        out += '\n';
        out += f.text;
        out += "\n\n";
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) noexcept {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out;
}

std::string file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h = fnv1a64(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
    }
    return "fnv1a64:" + hex64(h);
}

}  // namespace rtlrc
