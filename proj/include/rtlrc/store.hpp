#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "rtlrc/embed.hpp"
#include "rtlrc/split.hpp"

namespace rtlrc {

struct StoreEntry {
    std::string chunk_id;
    std::string source_path;
    std::size_t ordinal = 0;
    std::string text;
    Embedding embedding;
};

struct SearchHit {
    std::size_t index;  // position in VectorStore::entries()
    std::string chunk_id;
    double score;
};

// Flat exact cosine store. Entries are appended, then the store is frozen and
// becomes immutable; a frozen store can be searched from many threads.
class VectorStore {
public:
    VectorStore() = default;
    explicit VectorStore(std::size_t dim) : dim_(dim) {}

    // Throws DimensionMismatch, Error on duplicate id or when frozen.
    void add(StoreEntry entry);
    void freeze() noexcept { frozen_ = true; }

    bool frozen() const noexcept { return frozen_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<StoreEntry>& entries() const noexcept { return entries_; }

    // Descending score, ties by ascending (source_path, ordinal). Zero-vector
    // entries never appear.
    std::vector<SearchHit> top_k(const Embedding& query, std::size_t k) const;

    void save(const std::filesystem::path& path) const;
    static VectorStore load(const std::filesystem::path& path);

private:
    std::size_t dim_ = 0;
    bool frozen_ = false;
    std::vector<StoreEntry> entries_;
    std::unordered_set<std::string> ids_;
};

// Throws LengthMismatch or DimensionMismatch.
VectorStore build_store(const std::vector<Chunk>& chunks, std::vector<Embedding> embeddings);

std::vector<SearchHit> top_k(const VectorStore& store, const Embedding& query, std::size_t k);

}  // namespace rtlrc
