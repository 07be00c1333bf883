#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "rtlrc/corpus.hpp"
#include "rtlrc/embed.hpp"
#include "rtlrc/retrieve.hpp"
#include "rtlrc/split.hpp"
#include "rtlrc/tokenize.hpp"

namespace rtlrc {

class GenerationBackend;

// Prompt layout:
//   preamble
//   context_label <context> "\n"        (omitted when the context is empty)
//   file_label "// Current file: <path>\n" <file text>
// The file text is always the final section.
struct PromptTemplate {
    std::string name;
    std::string preamble;
    std::string context_label;
    std::string file_label;

    static const PromptTemplate& by_name(std::string_view name);  // default-v1 | instruct-v1
    std::string file_header(std::string_view current_path) const;
    std::string render(std::string_view context, std::string_view current_path,
                       std::string_view file_text) const;
};

enum class PathTaken { Direct, Rag };
std::string_view to_string(PathTaken p);

enum class ContextOrder { Descending, Ascending };
ContextOrder parse_context_order(std::string_view name);  // desc | asc
std::string_view to_string(ContextOrder o);

struct PipelineConfig {
    std::size_t budget = 10240;  // L
    SplitStrategy strategy;
    EmbedderConfig embedder;
    TokenCounter counter;
    bool gate_enabled = true;
    std::string prompt_template = "default-v1";
    ContextOrder context_order = ContextOrder::Descending;

    void validate() const;
};

struct PromptAssembly {
    PathTaken path_taken = PathTaken::Direct;
    std::string context_text;
    std::string file_text;  // suffix of current_prefix
    std::string prompt;
    std::size_t prompt_tokens = 0;
    // Tokens of the fully rendered direct prompt; the gate's measure.
    std::size_t direct_tokens = 0;
    bool file_truncated = false;
    std::optional<RetrievedContext> retrieval;  // Rag path only
};

// One configured pipeline. Construction validates the configuration; the
// object is immutable afterwards and may be used from many threads.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);

    const PipelineConfig& config() const noexcept { return config_; }
    const PromptTemplate& prompt_template() const noexcept { return *template_; }
    const Embedder& embedder() const noexcept { return embedder_; }

    std::string render_direct(const RepoSample& sample) const;
    std::size_t direct_tokens(const RepoSample& sample) const;
    PathTaken decide_path(const RepoSample& sample) const;

    // Throws BudgetImpossible when not even the template and the last line
    // of C_file fit in L.
    PromptAssembly assemble(const RepoSample& sample, bool keep_ranking = false) const;

    struct Completion {
        std::string prediction;
        PromptAssembly assembly;
    };
    Completion complete(const GenerationBackend& backend, const RepoSample& sample) const;

    // Longest line-aligned suffix of text such that
    // count(fixed + suffix) <= budget; nullopt if not even one line fits.
    std::optional<std::string_view> fit_tail_lines(std::string_view fixed, std::string_view text,
                                                   std::size_t budget) const;

private:
    PromptAssembly assemble_rag(const RepoSample& sample, std::size_t direct_tokens,
                                bool keep_ranking) const;

    PipelineConfig config_;
    const PromptTemplate* template_;
    Embedder embedder_;
};

PathTaken decide_path(const PipelineConfig& config, const RepoSample& sample);
PromptAssembly assemble_prompt(const PipelineConfig& config, const RepoSample& sample);
std::string complete(const PipelineConfig& config, const GenerationBackend& backend,
                     const RepoSample& sample);

// First line of a raw generation, without its line terminator.
std::string first_line(std::string_view raw);

}  // namespace rtlrc
