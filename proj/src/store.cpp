#include "rtlrc/store.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "rtlrc/error.hpp"

namespace rtlrc {

using nlohmann::json;

void VectorStore::add(StoreEntry entry) {
    if (frozen_) throw Error("vector store is frozen");
    if (entries_.empty() && dim_ == 0) dim_ = entry.embedding.dim();
    if (entry.embedding.dim() != dim_) throw DimensionMismatch(dim_, entry.embedding.dim());
    if (!ids_.insert(entry.chunk_id).second)
        throw Error("duplicate chunk id '" + entry.chunk_id + "'");
    entries_.push_back(std::move(entry));
}

std::vector<SearchHit> VectorStore::top_k(const Embedding& query, std::size_t k) const {
    if (k == 0 || entries_.empty()) return {};
    if (query.dim() != dim_) throw DimensionMismatch(dim_, query.dim());

    std::vector<SearchHit> hits;
    hits.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.embedding.is_zero()) continue;
        hits.push_back({i, e.chunk_id, std::clamp(dot(e.embedding, query), -1.0, 1.0)});
    }
    auto before = [this](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        const auto& ea = entries_[a.index];
        const auto& eb = entries_[b.index];
        if (ea.source_path != eb.source_path) return ea.source_path < eb.source_path;
        return ea.ordinal < eb.ordinal;
    };
    if (k < hits.size()) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                          before);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), before);
    }
    return hits;
}

void VectorStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << json{{"dim", dim_}, {"count", entries_.size()}, {"version", 1}}.dump() << '\n';
    for (const auto& e : entries_) {
        out << json{{"chunk_id", e.chunk_id},
                    {"source_path", e.source_path},
                    {"ordinal", e.ordinal},
                    {"text", e.text},
                    {"embedding", e.embedding.values}}
                   .dump()
            << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

VectorStore VectorStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty store file '" + path.string() + "'");

    try {
        auto header = json::parse(line);
        if (header.at("version").get<int>() != 1)
            throw IoError("unsupported store version in '" + path.string() + "'");
        VectorStore store(header.at("dim").get<std::size_t>());
        auto count = header.at("count").get<std::size_t>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto j = json::parse(line);
            StoreEntry e;
            e.chunk_id = j.at("chunk_id").get<std::string>();
            e.source_path = j.at("source_path").get<std::string>();
            e.ordinal = j.at("ordinal").get<std::size_t>();
            e.text = j.at("text").get<std::string>();
            e.embedding.values = j.at("embedding").get<std::vector<double>>();
            store.add(std::move(e));
        }
        if (store.size() != count)
            throw IoError("store '" + path.string() + "' header count " + std::to_string(count) +
                          " but " + std::to_string(store.size()) + " entries");
        store.freeze();
        return store;
    } catch (const json::exception& e) {
        throw IoError("corrupt store '" + path.string() + "': " + e.what());
    }
}

VectorStore build_store(const std::vector<Chunk>& chunks, std::vector<Embedding> embeddings) {
    if (chunks.size() != embeddings.size()) throw LengthMismatch(chunks.size(), embeddings.size());
    VectorStore store(embeddings.empty() ? 0 : embeddings.front().dim());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const auto& c = chunks[i];
        store.add({c.id(), c.source_path, c.ordinal, c.text, std::move(embeddings[i])});
    }
    store.freeze();
    return store;
}

std::vector<SearchHit> top_k(const VectorStore& store, const Embedding& query, std::size_t k) {
    return store.top_k(query, k);
}

}  // namespace rtlrc
