#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rtlrc {

enum class TokenScheme {
    Char4,           // ceil(bytes / 4)
    WhitespacePunct, // word runs + punctuation characters
    External,        // remote tokenizer service
};

// The len(.) used for every budget decision in a run. One instance is fixed
// at configuration time and shared by all modules.
class TokenCounter {
public:
    TokenCounter() = default;
    explicit TokenCounter(TokenScheme scheme) : scheme_(scheme) {}

    static TokenCounter external(std::string endpoint,
                                 std::chrono::milliseconds timeout = std::chrono::seconds(30),
                                 int retries = 2);

    TokenScheme scheme() const noexcept { return scheme_; }
    const std::string& endpoint() const noexcept { return endpoint_; }
    std::string describe() const;

    // Throws ExternalUnavailable for the External scheme on transport failure.
    std::size_t count(std::string_view text) const;

    // count(a + b) given count(a); avoids rescanning a for the local schemes.
    std::size_t count_joined(std::string_view a, std::size_t count_a, std::string_view b) const;

    // Longest prefix / suffix of text whose count is <= max_tokens. Cuts only
    // on UTF-8 character boundaries.
    std::string_view head(std::string_view text, std::size_t max_tokens) const;
    std::string_view tail(std::string_view text, std::size_t max_tokens) const;

    bool operator==(const TokenCounter& o) const noexcept {
        return scheme_ == o.scheme_ && endpoint_ == o.endpoint_;
    }

private:
    TokenScheme scheme_ = TokenScheme::Char4;
    std::string endpoint_;
    std::chrono::milliseconds timeout_{30'000};
    int retries_ = 2;
};

std::size_t count_tokens(const TokenCounter& counter, std::string_view text);

TokenScheme parse_token_scheme(std::string_view name);
std::string_view to_string(TokenScheme scheme);

// Word runs and punctuation characters in order; the token list behind the
// WhitespacePunct count and the hashing embedder.
std::vector<std::string_view> whitespace_punct_tokens(std::string_view text);

inline bool is_word_byte(unsigned char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c >= 0x80;
}

inline bool is_space_byte(unsigned char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace rtlrc
