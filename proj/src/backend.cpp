#include "rtlrc/backend.hpp"

#include <json.hpp>

#include "rtlrc/error.hpp"
#include "rtlrc/http.hpp"

namespace rtlrc {

using nlohmann::json;

std::string EchoTargetBackend::generate(const std::string&, const RepoSample& sample) const {
    return sample.target;
}

std::string FixedStringBackend::generate(const std::string&, const RepoSample&) const {
    return text_;
}

std::string_view file_section(std::string_view prompt, std::string_view current_prefix) {
    std::size_t n = 0;
    const std::size_t max = std::min(prompt.size(), current_prefix.size());
    while (n < max && prompt[prompt.size() - 1 - n] == current_prefix[current_prefix.size() - 1 - n])
        ++n;
    return prompt.substr(prompt.size() - n);
}

std::string CopyLastLineBackend::generate(const std::string& prompt,
                                          const RepoSample& sample) const {
    std::string_view rest = file_section(prompt, sample.current_prefix);
    while (!rest.empty()) {
        if (rest.back() == '\n') rest.remove_suffix(1);
        auto nl = rest.rfind('\n');
        std::string_view line = rest.substr(nl == std::string_view::npos ? 0 : nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t\r\f\v") != std::string_view::npos) return std::string(line);
        if (nl == std::string_view::npos) break;
        rest = rest.substr(0, nl + 1);
    }
    return {};
}

WireFormat parse_wire_format(std::string_view name) {
    if (name == "completion") return WireFormat::Completion;
    if (name == "chat") return WireFormat::Chat;
    throw ConfigError("unknown wire format '" + std::string(name) + "' (expected completion|chat)");
}

void HttpCompletionConfig::validate() const {
    if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
    if (max_inflight < 1) throw ConfigError("max_inflight must be >= 1");
    http::parse_endpoint(endpoint);
}

HttpCompletionBackend::HttpCompletionBackend(HttpCompletionConfig config)
    : config_(std::move(config)) {
    config_.validate();
    inflight_ = std::make_unique<std::counting_semaphore<>>(
        static_cast<std::ptrdiff_t>(config_.max_inflight));
}

std::string HttpCompletionBackend::describe() const {
    return "http(" + config_.endpoint + ",model=" + config_.model +
           ",wire=" + (config_.wire == WireFormat::Chat ? "chat" : "completion") + ")";
}

std::string HttpCompletionBackend::generate(const std::string& prompt, const RepoSample&) const {
    json body{{"model", config_.model},
              {"temperature", config_.temperature},
              {"max_tokens", config_.max_tokens},
              {"stop", config_.stop}};
    if (config_.wire == WireFormat::Chat)
        body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    else
        body["prompt"] = prompt;

    json res;
    {
        inflight_->acquire();
        struct Release {
            std::counting_semaphore<>& sem;
            ~Release() { sem.release(); }
        } release{*inflight_};
        try {
            res = http::post_json(http::parse_endpoint(config_.endpoint), body,
                                  {config_.timeout, config_.retries, std::chrono::milliseconds(500)});
        } catch (const Timeout&) {
            throw;
        } catch (const HttpError& e) {
            throw BackendHttpError(e.status(), e.what());
        }
    }

    const auto choices = res.find("choices");
    if (choices == res.end() || !choices->is_array() || choices->empty())
        throw BackendHttpError(200, "response has no choices: " + res.dump().substr(0, 200));
    const auto& first = choices->front();
    if (config_.wire == WireFormat::Chat) {
        auto msg = first.find("message");
        if (msg != first.end() && msg->contains("content") && (*msg)["content"].is_string())
            return (*msg)["content"].get<std::string>();
    }
    auto text = first.find("text");
    if (text == first.end() || !text->is_string())
        throw BackendHttpError(200, "choice has no text: " + first.dump().substr(0, 200));
    return text->get<std::string>();
}

std::unique_ptr<GenerationBackend> make_backend(std::string_view spec,
                                                const HttpCompletionConfig& http) {
    if (spec == "echo-target") return std::make_unique<EchoTargetBackend>();
    if (spec == "copy-last-line") return std::make_unique<CopyLastLineBackend>();
    if (spec.starts_with("fixed:"))
        return std::make_unique<FixedStringBackend>(std::string(spec.substr(6)));
    if (spec == "http") return std::make_unique<HttpCompletionBackend>(http);
    throw ConfigError("unknown backend '" + std::string(spec) +
                      "' (expected http|echo-target|fixed:<s>|copy-last-line)");
}

}  // namespace rtlrc
