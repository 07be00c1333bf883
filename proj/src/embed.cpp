#include "rtlrc/embed.hpp"

#include <cmath>
#include <exception>
#include <thread>
#include <map>

#include "rtlrc/corpus.hpp"
#include "rtlrc/error.hpp"
#include "rtlrc/http.hpp"

namespace rtlrc {

bool Embedding::is_zero() const noexcept {
    for (double v : values)
        if (v != 0.0) return false;
    return true;
}

double Embedding::norm() const noexcept {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

double dot(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

double cosine(const Embedding& a, const Embedding& b) {
    double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

void l2_normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    if (s == 0.0) return;
    double inv = 1.0 / std::sqrt(s);
    for (double& x : v) x *= inv;
}

Embedding hashed_embedding(std::string_view text, std::size_t dim) {
    std::map<std::string_view, std::size_t> tf;  // ordered: bucket sums are order-independent
    for (auto tok : whitespace_punct_tokens(text)) ++tf[tok];

    Embedding e;
    e.values.assign(dim, 0.0);
    for (const auto& [tok, n] : tf)
        e.values[fnv1a64(tok) % dim] += 1.0 + std::log(static_cast<double>(n));
    l2_normalize(e.values);
    return e;
}

void EmbedderConfig::validate() const {
    switch (kind) {
        case EmbedderKind::HashedBagOfTokens:
            if (dim < 2) throw ConfigError("hashing embedder dim must be >= 2");
            break;
        case EmbedderKind::Http:
            if (max_input_tokens < 1) throw ConfigError("max_input_tokens must be >= 1");
            if (max_batch < 1) throw ConfigError("embedding max_batch must be >= 1");
            if (max_inflight < 1) throw ConfigError("embedding max_inflight must be >= 1");
            http::parse_endpoint(endpoint);
            break;
    }
}

std::string EmbedderConfig::describe() const {
    if (kind == EmbedderKind::HashedBagOfTokens) {
        std::string s = "hash(dim=" + std::to_string(dim);
        if (max_input_tokens) s += ",max_input_tokens=" + std::to_string(max_input_tokens);
        return s + ")";
    }
    return "http(" + endpoint + ",model=" + model +
           ",max_input_tokens=" + std::to_string(max_input_tokens) + ")";
}

Embedder::Embedder(EmbedderConfig config, TokenCounter counter)
    : config_(std::move(config)),
      counter_(std::move(counter)),
      truncated_(std::make_shared<std::atomic<std::size_t>>(0)),
      service_dim_(std::make_shared<std::atomic<std::size_t>>(0)) {
    config_.validate();
}

std::string_view Embedder::fit_window(std::string_view text) const {
    if (config_.max_input_tokens == 0) return text;
    auto head = counter_.head(text, config_.max_input_tokens);
    if (head.size() < text.size()) truncated_->fetch_add(1);
    return head;
}

Embedding Embedder::embed(std::string_view text) const {
    if (config_.kind == EmbedderKind::HashedBagOfTokens)
        return hashed_embedding(fit_window(text), config_.dim);
    return request({text}, 0).front();
}

std::vector<Embedding> Embedder::request(const std::vector<std::string_view>& texts,
                                         std::size_t first_index) const {
    nlohmann::json inputs = nlohmann::json::array();
    for (auto t : texts) inputs.push_back(std::string(fit_window(t)));

    nlohmann::json res;
    try {
        res = http::post_json(http::parse_endpoint(config_.endpoint),
                              {{"model", config_.model}, {"input", std::move(inputs)}},
                              {config_.timeout, config_.retries, std::chrono::milliseconds(200)});
    } catch (const HttpError& e) {
        throw EmbedServiceError(e.status(), std::string("embedding service: ") + e.what(),
                                first_index);
    }

    auto data = res.find("data");
    if (data == res.end() || !data->is_array() || data->size() != texts.size())
        throw EmbedServiceError(200, "embedding service: expected 'data' with one entry per input",
                                first_index);

    std::vector<Embedding> out(texts.size());
    std::vector<bool> filled(texts.size(), false);
    for (const auto& item : *data) {
        auto idx = item.value("index", static_cast<std::size_t>(-1));
        if (idx >= texts.size() || filled[idx])
            throw EmbedServiceError(200, "embedding service: bad or repeated index", first_index);
        const auto& vec = item.at("embedding");
        Embedding e;
        e.values.reserve(vec.size());
        for (const auto& x : vec) {
            double v = x.get<double>();
            if (!std::isfinite(v))
                throw EmbedServiceError(200, "embedding service: non-finite value",
                                        first_index + idx);
            e.values.push_back(v);
        }
        std::size_t expected = 0;
        if (!service_dim_->compare_exchange_strong(expected, e.dim()) && expected != e.dim())
            throw DimensionMismatch(expected, e.dim());
        l2_normalize(e.values);
        out[idx] = std::move(e);
        filled[idx] = true;
    }
    return out;
}

std::vector<Embedding> Embedder::embed_batch(const std::vector<std::string_view>& texts) const {
    std::vector<Embedding> out(texts.size());
    if (config_.kind == EmbedderKind::HashedBagOfTokens) {
        for (std::size_t i = 0; i < texts.size(); ++i) out[i] = embed(texts[i]);
        return out;
    }

    const std::size_t batch = config_.max_batch;
    const std::size_t n_batches = (texts.size() + batch - 1) / batch;
    std::vector<std::exception_ptr> errors(n_batches);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t b = next++; b < n_batches; b = next++) {
            std::size_t lo = b * batch, hi = std::min(texts.size(), lo + batch);
            try {
                auto part = request({texts.begin() + static_cast<std::ptrdiff_t>(lo),
                                     texts.begin() + static_cast<std::ptrdiff_t>(hi)},
                                    lo);
                for (std::size_t i = lo; i < hi; ++i) out[i] = std::move(part[i - lo]);
            } catch (...) {
                errors[b] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < std::min(n_batches, config_.max_inflight); ++i)
            pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

Embedding embed_text(const EmbedderConfig& config, const TokenCounter& counter,
                     std::string_view text) {
    return Embedder(config, counter).embed(text);
}

std::vector<Embedding> embed_batch(const EmbedderConfig& config, const TokenCounter& counter,
                                   const std::vector<std::string_view>& texts) {
    return Embedder(config, counter).embed_batch(texts);
}

}  // namespace rtlrc
