#include "cli.hpp"

#include <csignal>
#include <fstream>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "crisisgt/error.hpp"
#include "crisisgt/report.hpp"
#include "crisisgt/service.hpp"
#include "crisisgt/summarizers.hpp"

namespace crisisgt::cli {

using nlohmann::json;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read {}", path));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Writes to the file when one is named, otherwise to out.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    file << content;
    if (!file) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path));
}

std::string with_newline(std::string text) {
    if (text.empty() || text.back() != '\n') text.push_back('\n');
    return text;
}

struct DatasetArgs {
    std::string path;
    std::string name;
    std::string keywords;

    void add(CLI::App& cmd) {
        cmd.add_option("--dataset", path, "Normalized dataset (JSONL from `ingest`)")->required();
        cmd.add_option("--name", name, "Dataset name (default: file stem)");
        cmd.add_option("--keywords", keywords, "Disaster keyword list, one term per line");
    }

    Dataset load() const {
        const std::set<std::string> words = keywords.empty() ? default_disaster_keywords() : read_term_list(keywords);
        Dataset dataset = read_dataset(path, words);
        if (!name.empty()) dataset.name = name;
        return dataset;
    }
};

struct LexiconArgs {
    std::string path;
    std::size_t expand = 5;
    std::optional<double> threshold;

    void add(CLI::App& cmd) {
        cmd.add_option("--lexicon", path, "Topic lexicon JSON (default: bundled)");
        cmd.add_option("--expand", expand, "Expansion terms per topic")->capture_default_str();
        cmd.add_option("--threshold", threshold, "Classification threshold (default: half the top seed weight)");
    }

    TopicLexicon base(const Normalizer& normalizer) const {
        return path.empty() ? default_lexicon(normalizer) : load_lexicon(path, normalizer);
    }

    TopicLexicon expanded(const Dataset& dataset, const Normalizer& normalizer) const {
        return expand_lexicon(dataset, base(normalizer), expand, threshold);
    }
};

Normalizer normalizer_for(const Dataset& dataset) {
    return Normalizer(NormalizerConfig::defaults(), dataset.disaster_keywords);
}

void add_ingest(CLI::App& app, std::ostream& out) {
    auto* cmd = app.add_subcommand("ingest", "Read a raw corpus and write the normalized dataset");
    auto input = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto name = std::make_shared<std::string>();
    auto keywords = std::make_shared<std::string>();
    auto stopwords = std::make_shared<std::string>();
    auto retweets = std::make_shared<std::string>("drop");
    auto strict = std::make_shared<bool>(false);
    cmd->add_option("--input", *input, "Corpus file (JSONL or CSV)")->required();
    cmd->add_option("--format", *format, "jsonl or csv (default: from the extension)");
    cmd->add_option("--out", *output, "Output dataset JSONL")->required();
    cmd->add_option("--name", *name, "Dataset name (default: input file stem)");
    cmd->add_option("--keywords", *keywords, "Disaster keyword list");
    cmd->add_option("--stopwords", *stopwords, "Stopword list (default: bundled)");
    cmd->add_option("--retweets", *retweets, "drop or strip")->capture_default_str();
    cmd->add_flag("--strict", *strict, "Fail on the first malformed record");
    cmd->callback([=, &out] {
        CorpusFormat fmt_kind = CorpusFormat::Jsonl;
        if (!format->empty()) {
            const auto parsed = parse_format(*format);
            if (!parsed) throw Error(ErrorCode::InvalidArgument, fmt::format("unknown format \"{}\"", *format));
            fmt_kind = *parsed;
        } else if (std::filesystem::path(*input).extension() == ".csv") {
            fmt_kind = CorpusFormat::Csv;
        }
        IngestOptions options;
        options.strict = *strict;
        options.name = *name;
        if (!keywords->empty()) options.disaster_keywords = read_term_list(*keywords);
        NormalizerConfig config = NormalizerConfig::defaults();
        if (!stopwords->empty()) {
            const auto words = read_term_list(*stopwords);
            config.stopwords = {words.begin(), words.end()};
        }
        if (*retweets == "strip") {
            config.retweets = RetweetPolicy::StripMarker;
        } else if (*retweets != "drop") {
            throw Error(ErrorCode::InvalidArgument, fmt::format("unknown retweet policy \"{}\"", *retweets));
        }
        const IngestResult result = ingest(*input, fmt_kind, options);
        NormalizeStats stats;
        const Dataset dataset = normalize(result.dataset, config, &stats);
        write_dataset(dataset, *output);
        const json report = {{"dataset", dataset.name},
                             {"tweets", dataset.tweets.size()},
                             {"malformed", result.malformed},
                             {"retweets_dropped", stats.retweets},
                             {"duplicates_dropped", stats.duplicates},
                             {"empty_dropped", stats.empty}};
        out << report.dump(2) << '\n';
    });
}

void add_classify(CLI::App& app, std::ostream& out) {
    auto* cmd = app.add_subcommand("classify", "Assign each tweet a topic");
    auto data = std::make_shared<DatasetArgs>();
    auto lex = std::make_shared<LexiconArgs>();
    auto output = std::make_shared<std::string>();
    auto lexicon_out = std::make_shared<std::string>();
    data->add(*cmd);
    lex->add(*cmd);
    cmd->add_option("--out", *output, "Assignment JSON (default: stdout)");
    cmd->add_option("--lexicon-out", *lexicon_out, "Write the expanded lexicon here");
    cmd->callback([=, &out] {
        const Dataset dataset = data->load();
        const Normalizer normalizer = normalizer_for(dataset);
        const TopicLexicon lexicon = lex->expanded(dataset, normalizer);
        const TopicAssignment assignment =
            classify(dataset, lexicon, lex->threshold.value_or(default_threshold(lexicon)));
        spdlog::info("classify: {} of {} tweets classified, {} dropped", assignment.classified_count(),
                     dataset.tweets.size(), assignment.dropped.size());
        if (!lexicon_out->empty()) emit(*lexicon_out, with_newline(lexicon_to_json(lexicon)), out);
        emit(*output, with_newline(assignment_to_json(assignment)), out);
    });
}

void add_rank(CLI::App& app, std::ostream& out) {
    auto* cmd = app.add_subcommand("rank", "Shortlist annotator candidates per topic with DMMR");
    auto data = std::make_shared<DatasetArgs>();
    auto lex = std::make_shared<LexiconArgs>();
    auto assignment_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto lambda = std::make_shared<double>(0.7);
    auto similarity = std::make_shared<std::string>("tfidf");
    auto embeddings = std::make_shared<std::string>();
    data->add(*cmd);
    lex->add(*cmd);
    cmd->add_option("--assignment", *assignment_path, "Assignment JSON from `classify`")->required();
    cmd->add_option("--out", *output, "Candidates JSON (default: stdout)");
    cmd->add_option("--lambda", *lambda, "Relevance weight in [0, 1]")->capture_default_str();
    cmd->add_option("--similarity", *similarity, "tfidf or embedding")->capture_default_str();
    cmd->add_option("--embeddings", *embeddings, "Embedding file for --similarity embedding");
    cmd->callback([=, &out] {
        const Dataset dataset = data->load();
        const Normalizer normalizer = normalizer_for(dataset);
        const TopicAssignment assignment = assignment_from_json(read_text(*assignment_path));
        const TopicLexicon lexicon = lex->expanded(dataset, normalizer);
        std::optional<EmbeddingTable> table;
        if (!embeddings->empty()) table = load_embeddings(*embeddings);
        DmmrParams params;
        params.lambda = *lambda;
        const auto kind = parse_similarity(*similarity);
        if (!kind) throw Error(ErrorCode::InvalidArgument, fmt::format("unknown similarity \"{}\"", *similarity));
        params.sim = *kind;
        params.embeddings = table ? &*table : nullptr;
        const TermIndex index = tfidf_index(dataset);
        const CandidateReport report =
            build_candidates(dataset, assignment, index, lexicon, normalizer.normalized_keywords(), params);
        emit(*output, with_newline(candidates_to_json(report.sets)), out);
    });
}

void add_summarize(CLI::App& app, std::ostream& out) {
    auto* cmd = app.add_subcommand("summarize", "Run an extractive summarizer");
    auto data = std::make_shared<DatasetArgs>();
    auto lex = std::make_shared<LexiconArgs>();
    auto method = std::make_shared<std::string>();
    auto budget = std::make_shared<std::size_t>(40);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto lambda = std::make_shared<double>(0.7);
    auto pool = std::make_shared<std::vector<std::string>>();
    auto output = std::make_shared<std::string>();
    auto text_out = std::make_shared<std::string>();
    data->add(*cmd);
    lex->add(*cmd);
    std::string names;
    for (Method m : all_methods()) names += (names.empty() ? "" : ", ") + std::string(to_string(m));
    cmd->add_option("--method", *method, "One of: " + names)->required();
    cmd->add_option("--budget", *budget, "Summary length in tweets")->capture_default_str();
    cmd->add_option("--seed", *seed, "Seed for randomized methods")->capture_default_str();
    cmd->add_option("--lambda", *lambda, "DMMR relevance weight for ontodsumm_lite")->capture_default_str();
    cmd->add_option("--pool", *pool, "Methods fused by ensum_lite")->delimiter(',');
    cmd->add_option("--out", *output, "Summary JSON (default: stdout)");
    cmd->add_option("--text-out", *text_out, "Also write one tweet per line here");
    cmd->callback([=, &out] {
        const Dataset dataset = data->load();
        SummarizerOptions options;
        options.seed = *seed;
        options.lambda = *lambda;
        options.expansion_k = lex->expand;
        options.threshold = lex->threshold;
        if (!lex->path.empty()) options.lexicon = lex->base(normalizer_for(dataset));
        if (!pool->empty()) {
            options.ensemble_pool.clear();
            for (const auto& name : *pool) options.ensemble_pool.push_back(parse_method(name));
        }
        const SummaryRecord summary = summarize(parse_method(*method), dataset, *budget, options);
        if (!text_out->empty()) emit(*text_out, summary_to_text(summary, dataset), out);
        emit(*output, with_newline(summary_to_json(summary)), out);
    });
}

std::vector<SummaryRecord> read_summaries(const std::vector<std::string>& paths) {
    std::vector<SummaryRecord> out;
    for (const auto& path : paths) out.push_back(read_summary(path));
    return out;
}

void add_evaluate(CLI::App& app, std::ostream& out) {
    auto* cmd = app.add_subcommand("evaluate", "Coverage, relevance and diversity of one summary");
    auto data = std::make_shared<DatasetArgs>();
    auto assignment_path = std::make_shared<std::string>();
    auto summary_path = std::make_shared<std::string>();
    auto embeddings = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    data->add(*cmd);
    cmd->add_option("--assignment", *assignment_path, "Assignment JSON")->required();
    cmd->add_option("--summary", *summary_path, "Summary JSON")->required();
    cmd->add_option("--embeddings", *embeddings, "Embedding file for diversity");
    cmd->add_option("--out", *output, "Result JSON (default: stdout)");
    cmd->callback([=, &out] {
        Dataset dataset = data->load();
        const TopicAssignment assignment = assignment_from_json(read_text(*assignment_path));
        std::optional<EmbeddingTable> table;
        if (!embeddings->empty()) table = load_embeddings(*embeddings);
        ReportInputs inputs;
        inputs.dataset = &dataset;
        inputs.assignment = &assignment;
        inputs.embeddings = table ? &*table : nullptr;
        SummaryRecord summary = read_summary(*summary_path);
        // The summary names its dataset; the file stem is only a default.
        if (data->name.empty() && !summary.dataset.empty()) dataset.name = summary.dataset;
        inputs.summaries.push_back(std::move(summary));
        const Report report = build_report(inputs);
        emit(*output, report_to_json(report)["summaries"][0].dump(2) + "\n", out);
    });
}

void add_rouge(CLI::App& app, std::ostream& out) {
    auto* cmd = app.add_subcommand("rouge", "ROUGE-1/2/L F1 between two text files");
    auto system = std::make_shared<std::string>();
    auto reference = std::make_shared<std::string>();
    auto raw = std::make_shared<bool>(false);
    auto output = std::make_shared<std::string>();
    cmd->add_option("--system", *system, "System summary text")->required();
    cmd->add_option("--reference", *reference, "Reference summary text")->required();
    cmd->add_flag("--raw-tokens", *raw, "Lowercased raw words instead of normalized tokens");
    cmd->add_option("--out", *output, "Result JSON (default: stdout)");
    cmd->callback([=, &out] {
        const Normalizer normalizer(NormalizerConfig::defaults(), default_disaster_keywords());
        const RougeTokens mode = *raw ? RougeTokens::Raw : RougeTokens::Normalized;
        const RougeScores scores = rouge(text_tokens(read_text(*system), mode, normalizer),
                                         text_tokens(read_text(*reference), mode, normalizer));
        const json result = {{"rouge1_f1", scores.rouge1_f1},
                             {"rouge2_f1", scores.rouge2_f1},
                             {"rougeL_f1", scores.rougeL_f1},
                             {"tokens", *raw ? "raw" : "normalized"}};
        emit(*output, result.dump(2) + "\n", out);
    });
}

void add_qa_sample(CLI::App& app, std::ostream& out) {
    auto* cmd = app.add_subcommand("qa-sample", "Draw the quality assessment sample per topic");
    auto assignment_path = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto output = std::make_shared<std::string>();
    cmd->add_option("--assignment", *assignment_path, "Assignment JSON")->required();
    cmd->add_option("--seed", *seed, "Sampling seed")->capture_default_str();
    cmd->add_option("--out", *output, "Sample JSON (default: stdout)");
    cmd->callback([=, &out] {
        const TopicAssignment assignment = assignment_from_json(read_text(*assignment_path));
        const QualitySample sample = qa_sample(assignment, *seed);
        json topics = json::object();
        for (const auto& [topic, ids] : sample.tweets) {
            topics[std::string(to_string(topic))] = {{"topic_size", assignment.buckets.at(topic).size()},
                                                     {"sample", ids}};
        }
        emit(*output, json{{"seed", *seed}, {"topics", topics}}.dump(2) + "\n", out);
    });
}

void add_serve(CLI::App& app) {
    auto* cmd = app.add_subcommand("serve", "Run the annotation HTTP service");
    auto config = std::make_shared<ApiConfig>();
    auto data_dir = std::make_shared<std::string>();
    auto token = std::make_shared<std::string>();
    cmd->add_option("--data-dir", *data_dir, "Directory with datasets/ and the event log")->required();
    cmd->add_option("--host", config->host, "Bind address")->capture_default_str();
    cmd->add_option("--port", config->port, "Port (0 picks a free one)")->capture_default_str();
    cmd->add_option("--token", *token, "Static bearer token")->envname("CRISISGT_TOKEN");
    cmd->add_option("--budget", config->budget, "Default session budget")->capture_default_str();
    cmd->add_flag("--allow-short", config->allow_short, "Allow finalizing below the budget");
    cmd->callback([=] {
        ApiConfig cfg = *config;
        cfg.data_dir = *data_dir;
        if (!token->empty()) cfg.token = *token;
        // Signals are taken by a dedicated thread so the server can be
        // stopped outside of a signal handler.
        sigset_t signals;
        sigemptyset(&signals);
        sigaddset(&signals, SIGINT);
        sigaddset(&signals, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &signals, nullptr);
        AnnotationService service(cfg, load_registry(cfg.data_dir));
        const int port = service.bind();
        spdlog::info("serving {} on http://{}:{}", cfg.data_dir.string(), cfg.host, port);
        std::thread waiter([&] {
            int received = 0;
            sigwait(&signals, &received);
            spdlog::info("signal {} received, stopping", received);
            service.stop();
        });
        service.run();
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    });
}

void add_report(CLI::App& app, std::ostream& out) {
    auto* cmd = app.add_subcommand("report", "Coverage, rating, relevance, diversity and ROUGE tables");
    auto data = std::make_shared<DatasetArgs>();
    auto assignment_path = std::make_shared<std::string>();
    auto candidates_path = std::make_shared<std::string>();
    auto summaries = std::make_shared<std::vector<std::string>>();
    auto events = std::make_shared<std::string>();
    auto embeddings = std::make_shared<std::string>();
    auto raw = std::make_shared<bool>(false);
    auto format = std::make_shared<std::string>("markdown");
    auto output = std::make_shared<std::string>();
    data->add(*cmd);
    cmd->add_option("--assignment", *assignment_path, "Assignment JSON")->required();
    cmd->add_option("--candidates", *candidates_path, "Candidates JSON, for the shortlist fraction");
    cmd->add_option("--summary", *summaries, "Summary JSON (repeatable)");
    cmd->add_option("--events", *events, "Annotation event log; adds human summaries and ratings");
    cmd->add_option("--embeddings", *embeddings, "Embedding file for diversity");
    cmd->add_flag("--raw-tokens", *raw, "ROUGE over raw words");
    cmd->add_option("--format", *format, "markdown or json")->capture_default_str();
    cmd->add_option("--out", *output, "Report file (default: stdout)");
    cmd->callback([=, &out] {
        const Dataset dataset = data->load();
        const TopicAssignment assignment = assignment_from_json(read_text(*assignment_path));
        std::optional<std::vector<CandidateSet>> candidates;
        if (!candidates_path->empty()) candidates = candidates_from_json(read_text(*candidates_path));
        std::optional<EmbeddingTable> table;
        if (!embeddings->empty()) table = load_embeddings(*embeddings);
        ReportInputs inputs;
        inputs.dataset = &dataset;
        inputs.assignment = &assignment;
        inputs.candidates = candidates ? &*candidates : nullptr;
        inputs.embeddings = table ? &*table : nullptr;
        inputs.rouge_tokens = *raw ? RougeTokens::Raw : RougeTokens::Normalized;
        inputs.summaries = read_summaries(*summaries);
        if (!events->empty()) {
            const SessionStore store = SessionStore::replay(EventLog::load(*events, false).events);
            for (const auto& id : store.session_ids()) {
                const AnnotationSession& session = store.get(id);
                if (session.spec.dataset != dataset.name || session.spec.mode != SessionMode::GroundTruth ||
                    !session.summary) {
                    continue;
                }
                inputs.summaries.push_back(*session.summary);
                auto ratings = store.ratings_for(id);
                if (!ratings.empty()) inputs.ratings[session.summary->method] = std::move(ratings);
            }
        }
        const Report report = build_report(inputs);
        if (*format == "json") {
            emit(*output, report_to_json(report).dump(2) + "\n", out);
        } else if (*format == "markdown") {
            emit(*output, report_to_markdown(report), out);
        } else {
            throw Error(ErrorCode::InvalidArgument, fmt::format("unknown report format \"{}\"", *format));
        }
    });
}

void print_error(std::ostream& err, std::string_view code, const std::string& message) {
    err << json{{"code", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Ground-truth summary pipeline for disaster tweets", "crisisgt");
    app.require_subcommand(1, 1);
    app.set_config("--config", "", "TOML-style key = value file; [subcommand] sections, flags override");
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();
    add_ingest(app, out);
    add_classify(app, out);
    add_rank(app, out);
    add_summarize(app, out);
    add_evaluate(app, out);
    add_rouge(app, out);
    add_qa_sample(app, out);
    add_serve(app);
    add_report(app, out);
    app.parse_complete_callback([&] { spdlog::set_level(spdlog::level::from_str(log_level)); });

    // CLI11 consumes arguments from the back and without the program name.
    std::vector<std::string> reversed;
    for (std::size_t i = args.size(); i > 1; --i) reversed.push_back(args[i - 1]);
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        print_error(err, "usage", e.what());
        err << app.help();
        return 2;
    } catch (const Error& e) {
        print_error(err, to_string(e.code()), e.what());
        return 1;
    } catch (const nlohmann::json::exception& e) {
        print_error(err, to_string(ErrorCode::MalformedRecord), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error(err, "internal", e.what());
        return 1;
    }
    return 0;
}

}  // namespace crisisgt::cli
