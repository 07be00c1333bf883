#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "rtlrc/corpus.hpp"

namespace rtlrc {

// The completion model. generate() returns the raw model output; callers clip
// it to one line. Implementations tolerate concurrent calls.
class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;
    virtual std::string generate(const std::string& prompt, const RepoSample& sample) const = 0;
    virtual std::string describe() const = 0;
    // True when repeated calls with the same input may differ.
    virtual bool nondeterministic() const { return false; }
};

// Returns the sample's target line. Scoring oracle.
class EchoTargetBackend final : public GenerationBackend {
public:
    std::string generate(const std::string& prompt, const RepoSample& sample) const override;
    std::string describe() const override { return "echo-target"; }
};

class FixedStringBackend final : public GenerationBackend {
public:
    explicit FixedStringBackend(std::string text) : text_(std::move(text)) {}
    std::string generate(const std::string& prompt, const RepoSample& sample) const override;
    std::string describe() const override { return "fixed:" + text_; }

private:
    std::string text_;
};

// Naive baseline: repeats the last non-blank line of the current file as it
// appears at the end of the prompt.
class CopyLastLineBackend final : public GenerationBackend {
public:
    std::string generate(const std::string& prompt, const RepoSample& sample) const override;
    std::string describe() const override { return "copy-last-line"; }
};

enum class WireFormat { Completion, Chat };
WireFormat parse_wire_format(std::string_view name);  // completion | chat

struct HttpCompletionConfig {
    std::string endpoint;
    std::string model;
    double temperature = 0.2;
    std::size_t max_tokens = 128;
    std::vector<std::string> stop{"\n"};
    WireFormat wire = WireFormat::Completion;
    std::chrono::milliseconds timeout{120'000};
    int retries = 2;
    std::size_t max_inflight = 4;

    void validate() const;
};

class HttpCompletionBackend final : public GenerationBackend {
public:
    explicit HttpCompletionBackend(HttpCompletionConfig config);
    std::string generate(const std::string& prompt, const RepoSample& sample) const override;
    std::string describe() const override;
    bool nondeterministic() const override { return config_.temperature > 0.0; }

    const HttpCompletionConfig& config() const noexcept { return config_; }

private:
    HttpCompletionConfig config_;
    std::unique_ptr<std::counting_semaphore<>> inflight_;
};

// Suffix of prompt that is also a suffix of the sample's current_prefix:
// the file section as it was placed in the prompt.
std::string_view file_section(std::string_view prompt, std::string_view current_prefix);

// "http" | "echo-target" | "fixed:<s>" | "copy-last-line". The HTTP settings
// are only used for "http".
std::unique_ptr<GenerationBackend> make_backend(std::string_view spec,
                                                const HttpCompletionConfig& http = {});

}  // namespace rtlrc
