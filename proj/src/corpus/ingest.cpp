#include <fstream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crisisgt/corpus.hpp"
#include "crisisgt/error.hpp"
#include "json.hpp"

namespace crisisgt {

using nlohmann::json;

std::string_view to_string(RelevanceLabel label) {
    switch (label) {
        case RelevanceLabel::High: return "high";
        case RelevanceLabel::Medium: return "medium";
        case RelevanceLabel::Low: return "low";
    }
    return "low";
}

std::optional<RelevanceLabel> parse_relevance(std::string_view text) {
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "high" || lower == "h") return RelevanceLabel::High;
    if (lower == "medium" || lower == "med" || lower == "m") return RelevanceLabel::Medium;
    if (lower == "low" || lower == "l") return RelevanceLabel::Low;
    return std::nullopt;
}

std::optional<CorpusFormat> parse_format(std::string_view text) {
    if (text == "jsonl") return CorpusFormat::Jsonl;
    if (text == "csv") return CorpusFormat::Csv;
    return std::nullopt;
}

const Tweet* Dataset::find(std::string_view id) const {
    for (const Tweet& tweet : tweets) {
        if (tweet.id == id) return &tweet;
    }
    return nullptr;
}

namespace {

struct RawRecord {
    std::size_t line = 0;
    std::optional<std::string> id;
    std::optional<std::string> text;
    std::optional<std::string> relevance;
    std::optional<std::string> explanation;
    std::string problem;  // set when the record could not be parsed at all
};

class RecordSink {
public:
    RecordSink(const IngestOptions& options, IngestResult& result)
        : options_(options), result_(result) {}

    void add(const RawRecord& record) {
        if (!record.problem.empty()) return reject(record.line, record.problem);
        if (!record.id || record.id->empty()) return reject(record.line, "missing field \"id\"");
        if (!record.text) return reject(record.line, "missing field \"text\"");
        if (!ids_.insert(*record.id).second) {
            return reject(record.line, fmt::format("duplicate id \"{}\"", *record.id));
        }
        Tweet tweet;
        tweet.id = *record.id;
        tweet.raw_text = *record.text;
        if (record.relevance && !record.relevance->empty()) {
            auto label = parse_relevance(*record.relevance);
            if (!label) {
                ids_.erase(*record.id);
                return reject(record.line,
                              fmt::format("invalid relevance_label \"{}\"", *record.relevance));
            }
            tweet.relevance_label = label;
        }
        if (record.explanation && !record.explanation->empty()) tweet.explanation = record.explanation;
        result_.dataset.tweets.push_back(std::move(tweet));
    }

private:
    void reject(std::size_t line, const std::string& reason) {
        const std::string message = fmt::format("line {}: {}", line, reason);
        if (options_.strict) throw Error(ErrorCode::MalformedRecord, message);
        spdlog::warn("skipping malformed record, {}", message);
        result_.warnings.push_back(message);
        ++result_.malformed;
    }

    const IngestOptions& options_;
    IngestResult& result_;
    std::unordered_set<std::string> ids_;
};

std::optional<std::string> scalar_string(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
    return std::nullopt;
}

RawRecord parse_json_record(const std::string& line, std::size_t line_no) {
    RawRecord record;
    record.line = line_no;
    json value;
    try {
        value = json::parse(line);
    } catch (const json::parse_error& e) {
        record.problem = fmt::format("invalid JSON ({})", e.what());
        return record;
    }
    if (!value.is_object()) {
        record.problem = "record is not a JSON object";
        return record;
    }
    if (auto it = value.find("id"); it != value.end()) record.id = scalar_string(*it);
    if (auto it = value.find("text"); it != value.end() && it->is_string()) record.text = it->get<std::string>();
    if (auto it = value.find("relevance_label"); it != value.end() && it->is_string()) {
        record.relevance = it->get<std::string>();
    }
    if (auto it = value.find("explanation"); it != value.end() && it->is_string()) {
        record.explanation = it->get<std::string>();
    }
    return record;
}

void read_jsonl(std::istream& in, RecordSink& sink) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        sink.add(parse_json_record(line, line_no));
    }
}

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks. Returns false at end of input.
bool next_csv_row(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no,
                  std::size_t& start_line, bool& unterminated) {
    fields.clear();
    unterminated = false;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    start_line = line_no + 1;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++line_no;
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
        }
    }
    if (!any) return false;
    ++line_no;
    unterminated = in_quotes;
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(std::move(field));
    return true;
}

void read_csv(std::istream& in, RecordSink& sink, const IngestOptions& options,
              IngestResult& result) {
    std::vector<std::string> fields;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool unterminated = false;
    if (!next_csv_row(in, fields, line_no, start, unterminated)) return;

    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        std::string name;
        for (char c : fields[i]) name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        column.emplace(name, i);
    }
    if (!column.count("id") || !column.count("text")) {
        const std::string message = "line 1: CSV header must name \"id\" and \"text\" columns";
        if (options.strict) throw Error(ErrorCode::MalformedRecord, message);
        spdlog::warn("{}", message);
        result.warnings.push_back(message);
        return;
    }
    const std::size_t width = fields.size();
    auto field = [&](const char* name) -> std::optional<std::string> {
        auto it = column.find(name);
        if (it == column.end() || it->second >= fields.size()) return std::nullopt;
        return fields[it->second];
    };
    while (next_csv_row(in, fields, line_no, start, unterminated)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        RawRecord record;
        record.line = start;
        if (unterminated) {
            record.problem = "unterminated quoted field";
        } else if (fields.size() != width) {
            record.problem = fmt::format("expected {} fields, found {}", width, fields.size());
        } else {
            record.id = field("id");
            record.text = field("text");
            record.relevance = field("relevance_label");
            record.explanation = field("explanation");
        }
        sink.add(record);
    }
}

}  // namespace

IngestResult ingest(const std::filesystem::path& path, CorpusFormat format,
                    const IngestOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read corpus file {}", path.string()));

    IngestResult result;
    result.dataset.name = options.name.empty() ? path.stem().string() : options.name;
    result.dataset.disaster_keywords =
        options.disaster_keywords.empty() ? default_disaster_keywords() : options.disaster_keywords;
    if (options.summary_budget < 1) {
        throw Error(ErrorCode::InvalidArgument, "summary budget must be at least 1");
    }
    result.dataset.summary_budget = options.summary_budget;

    RecordSink sink(options, result);
    if (format == CorpusFormat::Jsonl) {
        read_jsonl(in, sink);
    } else {
        read_csv(in, sink, options, result);
    }
    if (result.dataset.tweets.empty() && result.malformed == 0) {
        const std::string message = fmt::format("corpus {} is empty", path.string());
        spdlog::warn("{}", message);
        result.warnings.push_back(message);
    }
    return result;
}

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& token : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

}  // namespace

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
    for (const Tweet& tweet : dataset.tweets) {
        json record = {{"id", tweet.id}, {"text", tweet.raw_text}, {"tokens", tweet.tokens}};
        if (tweet.relevance_label) record["relevance_label"] = to_string(*tweet.relevance_label);
        if (tweet.explanation) record["explanation"] = *tweet.explanation;
        if (tweet.topic) record["topic"] = to_string(*tweet.topic);
        out << record.dump() << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, fmt::format("write failed for {}", path.string()));
}

Dataset read_dataset(const std::filesystem::path& path,
                     const std::set<std::string>& disaster_keywords) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read dataset file {}", path.string()));
    Dataset dataset;
    dataset.name = path.stem().string();
    dataset.disaster_keywords = disaster_keywords;
    bool all_tokenized = true;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::MalformedRecord, fmt::format("line {}: invalid JSON", line_no));
        }
        auto id = record.contains("id") ? scalar_string(record["id"]) : std::nullopt;
        if (!id || !record.contains("text") || !record["text"].is_string()) {
            throw Error(ErrorCode::MalformedRecord,
                        fmt::format("line {}: record needs \"id\" and \"text\"", line_no));
        }
        if (!ids.insert(*id).second) {
            throw Error(ErrorCode::MalformedRecord, fmt::format("line {}: duplicate id \"{}\"", line_no, *id));
        }
        Tweet tweet;
        tweet.id = *id;
        tweet.raw_text = record["text"].get<std::string>();
        if (record.contains("tokens")) {
            tweet.tokens = record["tokens"].get<std::vector<std::string>>();
            tweet.clean_text = join_tokens(tweet.tokens);
        } else {
            all_tokenized = false;
        }
        if (record.contains("relevance_label")) {
            tweet.relevance_label = parse_relevance(record["relevance_label"].get<std::string>());
        }
        if (record.contains("explanation")) tweet.explanation = record["explanation"].get<std::string>();
        if (record.contains("topic")) tweet.topic = parse_topic(record["topic"].get<std::string>());
        dataset.tweets.push_back(std::move(tweet));
    }
    if (!all_tokenized) return normalize(dataset);
    return dataset;
}

}  // namespace crisisgt
