#include "rtlrc/pipeline.hpp"

#include <algorithm>
#include <exception>

#include "rtlrc/backend.hpp"
#include "rtlrc/error.hpp"

namespace rtlrc {

namespace {

const PromptTemplate kDefaultV1{"default-v1", "", "", ""};

const PromptTemplate kInstructV1{
    "instruct-v1",
    "### Instruction\n"
    "Complete the next line of the current Verilog file. Reply with exactly one line of code.\n\n",
    "### Repository context\n",
    "### Current file\n",
};

std::string render_context(const std::vector<RankedChunk>& chunks, ContextOrder order) {
    std::string out;
    auto append = [&](const RankedChunk& rc) { out += render_retrieved_chunk(rc.chunk); };
    if (order == ContextOrder::Descending)
        std::for_each(chunks.begin(), chunks.end(), append);
    else
        std::for_each(chunks.rbegin(), chunks.rend(), append);
    return out;
}

}  // namespace

const PromptTemplate& PromptTemplate::by_name(std::string_view name) {
    if (name == kDefaultV1.name) return kDefaultV1;
    if (name == kInstructV1.name) return kInstructV1;
    throw ConfigError("unknown prompt template '" + std::string(name) +
                      "' (expected default-v1|instruct-v1)");
}

std::string PromptTemplate::file_header(std::string_view current_path) const {
    std::string out = file_label;
    out += "// Current file: ";
    out += current_path;
    out += '\n';
    return out;
}

std::string PromptTemplate::render(std::string_view context, std::string_view current_path,
                                   std::string_view file_text) const {
    std::string out = preamble;
    if (!context.empty()) {
        out += context_label;
        out += context;
        out += '\n';
    }
    out += file_header(current_path);
    out += file_text;
    return out;
}

std::string_view to_string(PathTaken p) { return p == PathTaken::Direct ? "direct" : "rag"; }

ContextOrder parse_context_order(std::string_view name) {
    if (name == "desc") return ContextOrder::Descending;
    if (name == "asc") return ContextOrder::Ascending;
    throw ConfigError("unknown context order '" + std::string(name) + "' (expected desc|asc)");
}

std::string_view to_string(ContextOrder o) {
    return o == ContextOrder::Descending ? "desc" : "asc";
}

void PipelineConfig::validate() const {
    if (budget < 1) throw ConfigError("budget L must be >= 1");
    if (strategy.chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
    embedder.validate();
    PromptTemplate::by_name(prompt_template);
}

Pipeline::Pipeline(PipelineConfig config)
    : config_(std::move(config)),
      template_(&PromptTemplate::by_name(config_.prompt_template)),
      embedder_(config_.embedder, config_.counter) {
    config_.validate();
}

std::string Pipeline::render_direct(const RepoSample& sample) const {
    return template_->render(concat_repo_context(sample), sample.current_path,
                             sample.current_prefix);
}

std::size_t Pipeline::direct_tokens(const RepoSample& sample) const {
    return config_.counter.count(render_direct(sample));
}

PathTaken Pipeline::decide_path(const RepoSample& sample) const {
    if (!config_.gate_enabled) return PathTaken::Rag;
    return direct_tokens(sample) < config_.budget ? PathTaken::Direct : PathTaken::Rag;
}

std::optional<std::string_view> Pipeline::fit_tail_lines(std::string_view fixed,
                                                         std::string_view text,
                                                         std::size_t budget) const {
    const auto& counter = config_.counter;
    const std::size_t fixed_tokens = counter.count(fixed);
    auto fits = [&](std::string_view suffix) {
        return counter.count_joined(fixed, fixed_tokens, suffix) <= budget;
    };
    if (fits(text)) return text;

    const auto lines = split_pieces(text, SplitKeyword::LineBreak);
    std::vector<std::size_t> starts;
    starts.reserve(lines.size());
    std::size_t offset = 0;
    for (auto line : lines) {
        starts.push_back(offset);
        offset += line.size();
    }
    if (starts.empty() || !fits(text.substr(starts.back()))) return std::nullopt;

    // Smallest starting line whose suffix fits; suffix counts shrink as the
    // start moves right.
    std::size_t lo = 0, hi = starts.size() - 1;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (fits(text.substr(starts[mid])))
            hi = mid;
        else
            lo = mid + 1;
    }
    return text.substr(starts[lo]);
}

PromptAssembly Pipeline::assemble(const RepoSample& sample, bool keep_ranking) const {
    std::string direct = render_direct(sample);
    const std::size_t tokens = config_.counter.count(direct);
    if (config_.gate_enabled && tokens < config_.budget) {
        PromptAssembly a;
        a.path_taken = PathTaken::Direct;
        a.context_text = concat_repo_context(sample);
        a.file_text = sample.current_prefix;
        a.prompt = std::move(direct);
        a.prompt_tokens = tokens;
        a.direct_tokens = tokens;
        return a;
    }
    return assemble_rag(sample, tokens, keep_ranking);
}

PromptAssembly Pipeline::assemble_rag(const RepoSample& sample, std::size_t direct_tokens,
                                      bool keep_ranking) const {
    const auto& counter = config_.counter;
    const std::size_t L = config_.budget;
    const std::string fixed = template_->preamble + template_->file_header(sample.current_path);

    auto file_text = fit_tail_lines(fixed, sample.current_prefix, L);
    if (!file_text)
        throw BudgetImpossible("budget " + std::to_string(L) +
                               " cannot hold the prompt template plus one line of '" +
                               sample.current_path + "'");

    const std::size_t base = counter.count(fixed + std::string(*file_text));
    const std::size_t overhead = counter.count(template_->context_label + "\n");
    const std::size_t retr_budget = L > base + overhead ? L - base - overhead : 0;

    PromptAssembly a;
    a.path_taken = PathTaken::Rag;
    a.direct_tokens = direct_tokens;
    a.file_text = std::string(*file_text);
    a.file_truncated = a.file_text.size() < sample.current_prefix.size();

    RetrievedContext ctx = retrieve(sample, config_.strategy, embedder_, retr_budget,
                                    RetrieveOptions{true, keep_ranking});
    for (;;) {
        a.context_text = render_context(ctx.chunks, config_.context_order);
        a.prompt = template_->render(a.context_text, sample.current_path, a.file_text);
        a.prompt_tokens = counter.count(a.prompt);
        if (a.prompt_tokens <= L || ctx.chunks.empty()) break;
        // Seam effects of a non-additive tokenizer; shed the lowest-ranked
        // admitted chunk so C_retr stays a ranking prefix.
        ctx.total_tokens -= ctx.chunks.back().cost;
        if (keep_ranking) ctx.ranking[ctx.chunks.size() - 1].admitted = false;
        ctx.chunks.pop_back();
    }
    a.retrieval = std::move(ctx);
    return a;
}

Pipeline::Completion Pipeline::complete(const GenerationBackend& backend,
                                        const RepoSample& sample) const {
    try {
        Completion c;
        c.assembly = assemble(sample);
        c.prediction = first_line(backend.generate(c.assembly.prompt, sample));
        return c;
    } catch (const std::exception& e) {
        std::throw_with_nested(SampleError(sample.id, e.what()));
    }
}

PathTaken decide_path(const PipelineConfig& config, const RepoSample& sample) {
    return Pipeline(config).decide_path(sample);
}

PromptAssembly assemble_prompt(const PipelineConfig& config, const RepoSample& sample) {
    return Pipeline(config).assemble(sample);
}

std::string complete(const PipelineConfig& config, const GenerationBackend& backend,
                     const RepoSample& sample) {
    return Pipeline(config).complete(backend, sample).prediction;
}

std::string first_line(std::string_view raw) {
    auto nl = raw.find('\n');
    auto line = raw.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return std::string(line);
}

}  // namespace rtlrc
