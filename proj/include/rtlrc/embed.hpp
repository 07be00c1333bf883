#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rtlrc/tokenize.hpp"

namespace rtlrc {

// L2-normalized vector; all zeros only for text without tokens.
struct Embedding {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    bool is_zero() const noexcept;
    double norm() const noexcept;
    bool operator==(const Embedding&) const = default;
};

double dot(const Embedding& a, const Embedding& b);
double cosine(const Embedding& a, const Embedding& b);

enum class EmbedderKind { HashedBagOfTokens, Http };

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::HashedBagOfTokens;
    std::size_t dim = 256;  // hashing embedder only, >= 2

    std::string endpoint;
    std::string model;
    // Embedding window. Inputs longer than this keep only their head. 0 means
    // unlimited and is only valid for the hashing embedder.
    std::size_t max_input_tokens = 0;
    std::chrono::milliseconds timeout{120'000};
    int retries = 2;
    std::size_t max_batch = 32;
    std::size_t max_inflight = 4;

    static EmbedderConfig hashed(std::size_t dim = 256) {
        EmbedderConfig c;
        c.dim = dim;
        return c;
    }
    static EmbedderConfig http(std::string endpoint, std::string model,
                               std::size_t max_input_tokens = 8192) {
        EmbedderConfig c;
        c.kind = EmbedderKind::Http;
        c.endpoint = std::move(endpoint);
        c.model = std::move(model);
        c.max_input_tokens = max_input_tokens;
        return c;
    }

    // Throws ConfigError when an invariant does not hold.
    void validate() const;
    std::string describe() const;
};

// Runs one embedding configuration. Holds the per-run state: the service's
// dimension once observed and a count of inputs cut to the window.
// Safe to share across threads.
class Embedder {
public:
    Embedder(EmbedderConfig config, TokenCounter counter);

    const EmbedderConfig& config() const noexcept { return config_; }
    const TokenCounter& counter() const noexcept { return counter_; }

    Embedding embed(std::string_view text) const;
    // Element i equals embed(texts[i]); order preserved.
    std::vector<Embedding> embed_batch(const std::vector<std::string_view>& texts) const;

    std::size_t truncated_inputs() const noexcept { return truncated_->load(); }

private:
    std::string_view fit_window(std::string_view text) const;
    std::vector<Embedding> request(const std::vector<std::string_view>& texts,
                                   std::size_t first_index) const;

    EmbedderConfig config_;
    TokenCounter counter_;
    std::shared_ptr<std::atomic<std::size_t>> truncated_;
    std::shared_ptr<std::atomic<std::size_t>> service_dim_;
};

Embedding embed_text(const EmbedderConfig& config, const TokenCounter& counter,
                     std::string_view text);
std::vector<Embedding> embed_batch(const EmbedderConfig& config, const TokenCounter& counter,
                                   const std::vector<std::string_view>& texts);

// Bag-of-tokens hashing: FNV-1a bucket per WhitespacePunct token, weight
// 1 + ln(tf), L2-normalized.
Embedding hashed_embedding(std::string_view text, std::size_t dim);

void l2_normalize(std::vector<double>& v);

}  // namespace rtlrc
