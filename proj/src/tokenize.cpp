#include "rtlrc/tokenize.hpp"

#include "rtlrc/error.hpp"
#include "rtlrc/http.hpp"

namespace rtlrc {

namespace {

std::size_t count_whitespace_punct(std::string_view text) noexcept {
    std::size_t n = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (is_word_byte(c)) {
            if (!in_word) ++n;
            in_word = true;
        } else {
            in_word = false;
            if (!is_space_byte(c)) ++n;
        }
    }
    return n;
}

bool is_boundary(std::string_view text, std::size_t pos) noexcept {
    return pos == 0 || pos >= text.size() ||
           (static_cast<unsigned char>(text[pos]) & 0xC0) != 0x80;
}

std::size_t floor_boundary(std::string_view text, std::size_t pos) noexcept {
    while (!is_boundary(text, pos)) --pos;
    return pos;
}

std::size_t ceil_boundary(std::string_view text, std::size_t pos) noexcept {
    while (!is_boundary(text, pos)) ++pos;
    return pos;
}

}  // namespace

TokenCounter TokenCounter::external(std::string endpoint, std::chrono::milliseconds timeout,
                                    int retries) {
    http::parse_endpoint(endpoint);  // validate early
    TokenCounter c(TokenScheme::External);
    c.endpoint_ = std::move(endpoint);
    c.timeout_ = timeout;
    c.retries_ = retries;
    return c;
}

std::string TokenCounter::describe() const {
    std::string s(to_string(scheme_));
    if (scheme_ == TokenScheme::External) s += "(" + endpoint_ + ")";
    return s;
}

std::size_t TokenCounter::count(std::string_view text) const {
    switch (scheme_) {
        case TokenScheme::Char4:
            return (text.size() + 3) / 4;
        case TokenScheme::WhitespacePunct:
            return count_whitespace_punct(text);
        case TokenScheme::External: {
            if (text.empty()) return 0;
            nlohmann::json res;
            try {
                res = http::post_json(http::parse_endpoint(endpoint_),
                                      {{"input", std::string(text)}},
                                      {timeout_, retries_, std::chrono::milliseconds(200)});
            } catch (const HttpError& e) {
                throw ExternalUnavailable(std::string("tokenizer service: ") + e.what());
            }
            auto it = res.find("count");
            if (it == res.end() || !it->is_number_integer() || it->get<long long>() < 0)
                throw ExternalUnavailable("tokenizer service returned no usable 'count'");
            return it->get<std::size_t>();
        }
    }
    return 0;
}

std::size_t TokenCounter::count_joined(std::string_view a, std::size_t count_a,
                                       std::string_view b) const {
    switch (scheme_) {
        case TokenScheme::Char4:
            return (a.size() + b.size() + 3) / 4;
        case TokenScheme::WhitespacePunct: {
            std::size_t n = count_a + count_whitespace_punct(b);
            if (!a.empty() && !b.empty() && is_word_byte(static_cast<unsigned char>(a.back())) &&
                is_word_byte(static_cast<unsigned char>(b.front())))
                --n;
            return n;
        }
        case TokenScheme::External: {
            std::string joined;
            joined.reserve(a.size() + b.size());
            joined.append(a).append(b);
            return count(joined);
        }
    }
    return 0;
}

std::string_view TokenCounter::head(std::string_view text, std::size_t max_tokens) const {
    if (scheme_ == TokenScheme::Char4) {
        std::size_t limit = max_tokens > text.size() / 4 + 1 ? text.size() : max_tokens * 4;
        return text.substr(0, floor_boundary(text, std::min(limit, text.size())));
    }
    if (count(text) <= max_tokens) return text;
    // Prefix counts are monotone in length, so the largest fitting cut is
    // found by bisection.
    std::size_t lo = 0, hi = text.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo + 1) / 2;
        if (count(text.substr(0, mid)) <= max_tokens)
            lo = mid;
        else
            hi = mid - 1;
    }
    return text.substr(0, floor_boundary(text, lo));
}

std::string_view TokenCounter::tail(std::string_view text, std::size_t max_tokens) const {
    if (scheme_ == TokenScheme::Char4) {
        std::size_t keep = max_tokens > text.size() / 4 + 1 ? text.size() : max_tokens * 4;
        keep = std::min(keep, text.size());
        return text.substr(ceil_boundary(text, text.size() - keep));
    }
    if (count(text) <= max_tokens) return text;
    // Smallest start offset whose suffix fits.
    std::size_t lo = 0, hi = text.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (count(text.substr(mid)) <= max_tokens)
            hi = mid;
        else
            lo = mid + 1;
    }
    return text.substr(ceil_boundary(text, lo));
}

std::size_t count_tokens(const TokenCounter& counter, std::string_view text) {
    return counter.count(text);
}

TokenScheme parse_token_scheme(std::string_view name) {
    if (name == "char4") return TokenScheme::Char4;
    if (name == "wspunct") return TokenScheme::WhitespacePunct;
    if (name == "http" || name == "external") return TokenScheme::External;
    throw ConfigError("unknown tokenizer scheme '" + std::string(name) + "'");
}

std::string_view to_string(TokenScheme scheme) {
    switch (scheme) {
        case TokenScheme::Char4: return "char4";
        case TokenScheme::WhitespacePunct: return "wspunct";
        case TokenScheme::External: return "http";
    }
    return "?";
}

std::vector<std::string_view> whitespace_punct_tokens(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        auto c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            std::size_t j = i + 1;
            while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back(text.substr(i, j - i));
            i = j;
        } else {
            if (!is_space_byte(c)) out.push_back(text.substr(i, 1));
            ++i;
        }
    }
    return out;
}

}  // namespace rtlrc
