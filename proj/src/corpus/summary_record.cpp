#include "crisisgt/summary_record.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "crisisgt/error.hpp"
#include "json.hpp"

namespace crisisgt {

using nlohmann::json;

std::string summary_to_json(const SummaryRecord& summary) {
    json root = {{"method", summary.method},
                 {"dataset", summary.dataset},
                 {"budget", summary.budget},
                 {"tweet_ids", summary.tweet_ids}};
    return root.dump(2);
}

SummaryRecord summary_from_json(std::string_view json_text) {
    try {
        const json root = json::parse(json_text);
        SummaryRecord summary;
        summary.method = root.at("method").get<std::string>();
        summary.dataset = root.at("dataset").get<std::string>();
        summary.budget = root.at("budget").get<int>();
        summary.tweet_ids = root.at("tweet_ids").get<std::vector<std::string>>();
        return summary;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, fmt::format("malformed summary record: {}", e.what()));
    }
}

std::string summary_to_text(const SummaryRecord& summary, const Dataset& dataset) {
    std::string out;
    for (const auto& id : summary.tweet_ids) {
        const Tweet* tweet = dataset.find(id);
        if (tweet == nullptr) throw Error(ErrorCode::UnknownTweet, fmt::format("unknown tweet {}", id));
        std::string line = tweet->raw_text;
        for (char& c : line) {
            if (c == '\n' || c == '\r') c = ' ';
        }
        out += line;
        out += '\n';
    }
    return out;
}

void write_summary(const SummaryRecord& summary, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
    out << summary_to_json(summary) << '\n';
}

SummaryRecord read_summary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return summary_from_json(buffer.str());
}

void validate_summary(const SummaryRecord& summary, const Dataset& dataset) {
    if (summary.budget < 1) throw Error(ErrorCode::InvalidArgument, "summary budget must be positive");
    if (summary.tweet_ids.size() > static_cast<std::size_t>(summary.budget)) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("summary holds {} tweets, budget is {}", summary.tweet_ids.size(), summary.budget));
    }
    std::set<std::string> seen;
    for (const auto& id : summary.tweet_ids) {
        if (!seen.insert(id).second) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("tweet {} appears twice in the summary", id));
        }
        if (dataset.find(id) == nullptr) {
            throw Error(ErrorCode::UnknownTweet, fmt::format("summary tweet {} is not in dataset {}", id, dataset.name));
        }
    }
}

}  // namespace crisisgt
