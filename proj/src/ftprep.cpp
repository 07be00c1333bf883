#include "rtlrc/ftprep.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "rtlrc/error.hpp"

namespace rtlrc {

using nlohmann::json;

FtResult prepare_ft_dataset(const Dataset& dataset, const PipelineConfig& config,
                            std::size_t budget) {
    if (budget < 1) throw ConfigError("fine-tune budget must be >= 1");
    const Pipeline pipeline(config);
    const auto& tpl = pipeline.prompt_template();
    const auto& counter = config.counter;

    FtResult result;
    for (const auto& sample : dataset.samples) {
        // Prompt with the first `dropped` context files removed.
        auto render = [&](std::size_t dropped) {
            RepoSample view = sample;
            view.context_files.erase(view.context_files.begin(),
                                     view.context_files.begin() +
                                         static_cast<std::ptrdiff_t>(dropped));
            return tpl.render(concat_repo_context(view), sample.current_path,
                              sample.current_prefix);
        };

        FtSample ft;
        ft.sample_id = sample.id;
        ft.output = sample.target;
        ft.input = render(0);
        ft.input_tokens = counter.count(ft.input);

        if (ft.input_tokens > budget) {
            ft.truncated = true;
            // Fewest front files to drop; counts only shrink as more go.
            std::size_t lo = 1, hi = sample.context_files.size();
            while (lo < hi) {
                std::size_t mid = lo + (hi - lo) / 2;
                if (counter.count(render(mid)) <= budget)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            ft.dropped_files = std::min(lo, sample.context_files.size());
            ft.input = render(ft.dropped_files);
            ft.input_tokens = counter.count(ft.input);
        }
        if (ft.input_tokens > budget) {
            const std::string fixed = tpl.preamble + tpl.file_header(sample.current_path);
            auto tail = pipeline.fit_tail_lines(fixed, sample.current_prefix, budget);
            if (!tail) {
                result.skipped.push_back(
                    {sample.id, "current file does not fit the budget even as a single line"});
                continue;
            }
            ft.input = tpl.render("", sample.current_path, *tail);
            ft.input_tokens = counter.count(ft.input);
        }
        result.samples.push_back(std::move(ft));
    }
    return result;
}

Dataset sample_subset(const Dataset& dataset, std::size_t limit, std::uint64_t seed) {
    Dataset out;
    out.source_path = dataset.source_path;
    out.unknown_fields = dataset.unknown_fields;
    std::mt19937_64 rng(seed);
    std::sample(dataset.samples.begin(), dataset.samples.end(), std::back_inserter(out.samples),
                static_cast<std::ptrdiff_t>(limit), rng);
    return out;
}

void export_jsonl(const std::vector<FtSample>& samples, const std::filesystem::path& path,
                  bool force) {
    if (!force && std::filesystem::exists(path))
        throw IoError("'" + path.string() + "' already exists (use --force to overwrite)");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    for (const auto& s : samples) {
        json meta{{"sample_id", s.sample_id},
                  {"truncated", s.truncated},
                  {"input_tokens", s.input_tokens},
                  {"dropped_files", s.dropped_files}};
        out << json{{"input", s.input}, {"output", s.output}, {"meta", std::move(meta)}}.dump()
            << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<FtSample> load_ft_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<FtSample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = json::parse(line);
        const auto& meta = j.at("meta");
        out.push_back({j.at("input").get<std::string>(), j.at("output").get<std::string>(),
                       meta.at("sample_id").get<std::string>(), meta.at("truncated").get<bool>(),
                       meta.at("input_tokens").get<std::size_t>(),
                       meta.value("dropped_files", std::size_t{0})});
    }
    return out;
}

}  // namespace rtlrc
