#include "crisisgt/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "crisisgt/error.hpp"

namespace crisisgt {

using nlohmann::json;

std::optional<double> Report::candidate_fraction() const {
    if (!shortlisted || !candidate_source || *candidate_source == 0) return std::nullopt;
    return static_cast<double>(*shortlisted) / static_cast<double>(*candidate_source);
}

namespace {

bool all_labelled(const SummaryRecord& summary, const Dataset& dataset) {
    return std::all_of(summary.tweet_ids.begin(), summary.tweet_ids.end(), [&](const std::string& id) {
        const Tweet* tweet = dataset.find(id);
        return tweet && tweet->relevance_label;
    });
}

bool all_explained(const SummaryRecord& summary, const Dataset& dataset) {
    return std::all_of(summary.tweet_ids.begin(), summary.tweet_ids.end(), [&](const std::string& id) {
        const Tweet* tweet = dataset.find(id);
        return tweet && tweet->explanation;
    });
}

}  // namespace

Report build_report(const ReportInputs& inputs) {
    if (inputs.dataset == nullptr || inputs.assignment == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "a report needs a dataset and its topic assignment");
    }
    const Dataset& dataset = *inputs.dataset;
    Report report;
    report.dataset = dataset.name;
    report.tweets = dataset.tweets.size();
    report.classified = inputs.assignment->classified_count();
    report.histogram = topic_histogram(*inputs.assignment);
    if (inputs.candidates) {
        std::size_t shortlisted = 0;
        std::size_t source = 0;
        for (const auto& set : *inputs.candidates) {
            shortlisted += set.ranked_ids.size();
            source += set.source_size;
        }
        report.shortlisted = shortlisted;
        report.candidate_source = source;
    }

    std::vector<SummaryRecord> summaries = inputs.summaries;
    std::sort(summaries.begin(), summaries.end(),
              [](const SummaryRecord& a, const SummaryRecord& b) { return a.method < b.method; });
    for (std::size_t i = 1; i < summaries.size(); ++i) {
        if (summaries[i].method == summaries[i - 1].method) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("two summaries named {}", summaries[i].method));
        }
    }
    for (const auto& summary : summaries) {
        if (!summary.dataset.empty() && !dataset.name.empty() && summary.dataset != dataset.name) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("summary {} belongs to dataset {}, not {}",
                                                                summary.method, summary.dataset, dataset.name));
        }
        validate_summary(summary, dataset);
        SummaryRow row;
        row.method = summary.method;
        row.size = summary.tweet_ids.size();
        row.coverage = coverage_report(summary, *inputs.assignment);
        if (!summary.tweet_ids.empty() && all_labelled(summary, dataset)) {
            row.relevance = relevance_distribution(summary, dataset);
        }
        if (inputs.embeddings && summary.tweet_ids.size() >= 2 && all_explained(summary, dataset)) {
            row.diversity = diversity(summary, dataset, *inputs.embeddings);
        }
        if (auto it = inputs.ratings.find(summary.method); it != inputs.ratings.end() && !it->second.empty()) {
            row.ratings = aggregate_ratings(it->second);
        }
        report.rows.push_back(std::move(row));
    }

    for (const auto& system : summaries) {
        if (is_human_method(system.method)) continue;
        const auto sys_tokens = summary_tokens(system, dataset, inputs.rouge_tokens);
        for (const auto& reference : summaries) {
            if (!is_human_method(reference.method)) continue;
            const auto ref_tokens = summary_tokens(reference, dataset, inputs.rouge_tokens);
            if (sys_tokens.empty() || ref_tokens.empty()) continue;
            report.rouge.push_back({system.method, reference.method, rouge(sys_tokens, ref_tokens)});
        }
    }
    return report;
}

json report_to_json(const Report& report) {
    json histogram = json::object();
    for (const auto& [topic, n] : report.histogram) histogram[std::string(to_string(topic))] = n;
    json root = {{"dataset", report.dataset},
                 {"tweets", report.tweets},
                 {"classified", report.classified},
                 {"histogram", histogram}};
    if (auto fraction = report.candidate_fraction()) {
        root["candidates"] = {{"shortlisted", *report.shortlisted},
                              {"classified", *report.candidate_source},
                              {"fraction", *fraction}};
    }
    json rows = json::array();
    for (const auto& row : report.rows) {
        json missed = json::array();
        for (TopicLabel topic : row.coverage.missed) missed.push_back(to_string(topic));
        json entry = {{"method", row.method},
                      {"size", row.size},
                      {"coverage",
                       {{"topics_present", row.coverage.topics_present},
                        {"missed", missed},
                        {"unclassified", row.coverage.unclassified}}}};
        entry["relevance"] = row.relevance ? json{{"high_pct", row.relevance->high_pct},
                                                  {"med_pct", row.relevance->med_pct},
                                                  {"low_pct", row.relevance->low_pct}}
                                           : json(nullptr);
        entry["diversity"] = row.diversity ? json{{"avg", row.diversity->avg},
                                                  {"pairs", row.diversity->pairs},
                                                  {"obtuse_pairs", row.diversity->obtuse_pairs}}
                                           : json(nullptr);
        entry["ratings"] = row.ratings ? json{{"coverage", row.ratings->coverage},
                                              {"relevance", row.ratings->relevance},
                                              {"diversity", row.ratings->diversity},
                                              {"count", row.ratings->count}}
                                       : json(nullptr);
        rows.push_back(std::move(entry));
    }
    root["summaries"] = rows;
    json rouge = json::array();
    for (const auto& cell : report.rouge) {
        rouge.push_back({{"system", cell.system},
                         {"reference", cell.reference},
                         {"rouge1_f1", cell.scores.rouge1_f1},
                         {"rouge2_f1", cell.scores.rouge2_f1},
                         {"rougeL_f1", cell.scores.rougeL_f1}});
    }
    root["rouge"] = rouge;
    return root;
}

std::string report_to_markdown(const Report& report) {
    std::string out = fmt::format("# Report: {}\n\n", report.dataset);
    out += fmt::format("Tweets: {}. Classified: {}.\n", report.tweets, report.classified);
    if (auto fraction = report.candidate_fraction()) {
        out += fmt::format("Candidates: {} of {} classified tweets ({:.2f}%).\n", *report.shortlisted,
                           *report.candidate_source, 100.0 * *fraction);
    }

    out += "\n## Topics\n\n| Topic | Tweets |\n|---|---|\n";
    for (const auto& [topic, n] : report.histogram) out += fmt::format("| {} | {} |\n", to_string(topic), n);

    if (report.rows.empty()) return out;

    out += "\n## Coverage\n\n| Summary | Topics covered | Missed |\n|---|---|---|\n";
    for (const auto& row : report.rows) {
        std::string missed;
        for (TopicLabel topic : row.coverage.missed) {
            if (!missed.empty()) missed += ", ";
            missed += to_string(topic);
        }
        out += fmt::format("| {} | {} | {} |\n", row.method, row.coverage.topics_present,
                           missed.empty() ? "-" : missed);
    }

    out += "\n## Ratings\n\n| Summary | Coverage | Relevance | Diversity | Raters |\n|---|---|---|---|---|\n";
    for (const auto& row : report.rows) {
        if (row.ratings) {
            out += fmt::format("| {} | {:.2f} | {:.2f} | {:.2f} | {} |\n", row.method, row.ratings->coverage,
                               row.ratings->relevance, row.ratings->diversity, row.ratings->count);
        } else {
            out += fmt::format("| {} | - | - | - | 0 |\n", row.method);
        }
    }

    auto pct = [](double value) { return value == 0.0 ? std::string("-") : fmt::format("{:.2f}%", value); };
    out += "\n## Relevance\n\n| Summary | High | Medium | Low |\n|---|---|---|---|\n";
    for (const auto& row : report.rows) {
        if (row.relevance) {
            out += fmt::format("| {} | {} | {} | {} |\n", row.method, pct(row.relevance->high_pct),
                               pct(row.relevance->med_pct), pct(row.relevance->low_pct));
        } else {
            out += fmt::format("| {} | n/a | n/a | n/a |\n", row.method);
        }
    }

    out += "\n## Diversity\n\n| Summary | AvgDiv | Pairs | Obtuse pairs |\n|---|---|---|---|\n";
    for (const auto& row : report.rows) {
        if (row.diversity) {
            out += fmt::format("| {} | {:.4f} | {} | {} |\n", row.method, row.diversity->avg, row.diversity->pairs,
                               row.diversity->obtuse_pairs);
        } else {
            out += fmt::format("| {} | n/a | - | - |\n", row.method);
        }
    }

    if (!report.rouge.empty()) {
        out += "\n## ROUGE F1\n\n| System | Reference | ROUGE-1 | ROUGE-2 | ROUGE-L |\n|---|---|---|---|---|\n";
        for (const auto& cell : report.rouge) {
            out += fmt::format("| {} | {} | {:.4f} | {:.4f} | {:.4f} |\n", cell.system, cell.reference,
                               cell.scores.rouge1_f1, cell.scores.rouge2_f1, cell.scores.rougeL_f1);
        }
    }
    return out;
}

}  // namespace crisisgt
