#include "crisisgt/service.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crisisgt/error.hpp"
#include "crisisgt/random.hpp"
#include "httplib.h"

namespace crisisgt {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Writes through a temporary file so readers never observe a partial file.
void write_atomically(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", tmp));
    }
    std::filesystem::rename(tmp, path);
}

bool valid_name(const std::string& name) {
    if (name.empty() || name.size() > 64) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    }) && name.front() != '.';
}

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
    return json_response(status, {{"code", code}, {"message", message}});
}

json parse_body(const std::string& body) {
    try {
        json value = json::parse(body.empty() ? "{}" : body);
        if (!value.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
        return value;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("request body is not valid JSON: {}", e.what()));
    }
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string part;
    for (char c : path) {
        if (c == '/') {
            if (!part.empty()) parts.push_back(std::move(part));
            part.clear();
        } else {
            part.push_back(c);
        }
    }
    if (!part.empty()) parts.push_back(std::move(part));
    return parts;
}

TopicLabel topic_param(const std::string& text) {
    const auto topic = parse_topic(text);
    if (!topic) throw Error(ErrorCode::InvalidArgument, fmt::format("unknown topic \"{}\"", text));
    return *topic;
}

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownDataset: return 404;
        case ErrorCode::DuplicateSession:
        case ErrorCode::SessionFinalized:
        case ErrorCode::SessionOpen:
        case ErrorCode::BudgetExceeded:
        case ErrorCode::UnderBudget: return 409;
        case ErrorCode::Io:
        case ErrorCode::CorruptLog: return 500;
        default: return 400;
    }
}

DatasetEntry load_dataset_entry(const std::filesystem::path& dir) {
    DatasetEntry entry;
    entry.name = dir.filename().string();
    entry.dataset = read_dataset(dir / kDatasetFile);
    entry.dataset.name = entry.name;
    entry.assignment = assignment_from_json(read_text(dir / kAssignmentFile));
    entry.candidates = candidates_from_json(read_text(dir / kCandidatesFile));
    for (const auto& set : entry.candidates) {
        for (const auto& id : set.ranked_ids) {
            if (entry.dataset.find(id) == nullptr) {
                throw Error(ErrorCode::MalformedRecord,
                            fmt::format("dataset {}: candidate {} is not in the dataset", entry.name, id));
            }
        }
    }
    if (std::filesystem::exists(dir / kEmbeddingsFile)) entry.embeddings = load_embeddings(dir / kEmbeddingsFile);
    if (std::filesystem::is_directory(dir / kSummariesDir)) {
        std::vector<std::filesystem::path> files;
        for (const auto& file : std::filesystem::directory_iterator(dir / kSummariesDir)) {
            if (file.path().extension() == ".json") files.push_back(file.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            SummaryRecord summary = read_summary(file);
            if (summary.dataset.empty()) summary.dataset = entry.name;
            validate_summary(summary, entry.dataset);
            entry.system_summaries.push_back(std::move(summary));
        }
    }
    return entry;
}

std::vector<DatasetEntry> load_registry(const std::filesystem::path& data_dir) {
    std::vector<std::filesystem::path> dirs;
    const auto root = data_dir / "datasets";
    if (std::filesystem::is_directory(root)) {
        for (const auto& item : std::filesystem::directory_iterator(root)) {
            if (item.is_directory()) dirs.push_back(item.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<DatasetEntry> registry;
    for (const auto& dir : dirs) registry.push_back(load_dataset_entry(dir));
    return registry;
}

AnnotationService::AnnotationService(ApiConfig config, std::vector<DatasetEntry> registry, Clock clock)
    : config_(std::move(config)) {
    for (auto& entry : registry) {
        if (!valid_name(entry.name)) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("invalid dataset name \"{}\"", entry.name));
        }
        const std::string name = entry.name;
        if (!registry_.emplace(name, std::move(entry)).second) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("dataset {} is registered twice", name));
        }
    }
    std::filesystem::create_directories(config_.data_dir / "snapshots");
    const auto log_path = config_.data_dir / "events.jsonl";
    const LogLoad loaded = EventLog::load(log_path);
    store_ = std::make_unique<SessionStore>(SessionStore::replay(loaded.events, clock));
    log_ = std::make_unique<EventLog>(log_path);
    store_->set_sink([this](const Event& event) { log_->append(event); });
    for (const auto& id : store_->session_ids()) write_snapshot(id);
    spdlog::info("service: {} datasets, {} sessions restored from {} events", registry_.size(),
                 store_->session_ids().size(), loaded.events.size());
}

AnnotationService::~AnnotationService() { stop(); }

void AnnotationService::write_snapshot(const std::string& session_id) const {
    write_atomically(config_.data_dir / "snapshots" / (session_id + ".json"),
                     session_to_json(store_->get(session_id)).dump(2) + "\n");
}

const DatasetEntry& AnnotationService::entry(const std::string& name) const {
    auto it = registry_.find(name);
    if (it == registry_.end()) throw Error(ErrorCode::UnknownDataset, fmt::format("unknown dataset {}", name));
    return it->second;
}

HttpResponse AnnotationService::handle(const std::string& method, const std::string& path,
                                       const std::map<std::string, std::string>& query, const std::string& body,
                                       const std::string& authorization) {
    if (config_.token && authorization != "Bearer " + *config_.token) {
        return error_response(401, "unauthorized", "missing or wrong bearer token");
    }
    try {
        const auto parts = split_path(path);
        if (method == "GET") {
            std::shared_lock lock(mutex_);
            return route(method, parts, query, body);
        }
        std::unique_lock lock(mutex_);
        return route(method, parts, query, body);
    } catch (const Error& e) {
        return error_response(http_status(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
        return error_response(400, to_string(ErrorCode::InvalidArgument), e.what());
    } catch (const std::exception& e) {
        spdlog::error("request {} {} failed: {}", method, path, e.what());
        return error_response(500, "internal", e.what());
    }
}

HttpResponse AnnotationService::route(const std::string& method, const std::vector<std::string>& p,
                                      const std::map<std::string, std::string>& query, const std::string& body) {
    auto param = [&](const char* key, const char* fallback) {
        auto it = query.find(key);
        return it == query.end() ? std::string(fallback) : it->second;
    };
    const std::size_t n = p.size();
    if (method == "GET") {
        if (n == 1 && p[0] == "datasets") return list_datasets();
        if (n == 3 && p[0] == "datasets" && p[2] == "topics") return dataset_topics(p[1]);
        if (n == 4 && p[0] == "datasets" && p[2] == "candidates") return dataset_candidates(p[1], p[3]);
        if (n == 2 && p[0] == "sessions") return get_session(p[1]);
        if (n == 3 && p[0] == "sessions" && p[2] == "export") return export_summary(p[1], param("format", "json"));
        if (n == 2 && p[0] == "reports") return report(p[1], param("format", "json"));
        if (n == 3 && p[0] == "annotators" && p[2] == "verdict") return verdict(p[1]);
    } else if (method == "POST") {
        if (n == 1 && p[0] == "sessions") return create_session(body);
        if (n == 3 && p[0] == "sessions" && p[2] == "toggle") return toggle(p[1], body);
        if (n == 3 && p[0] == "sessions" && p[2] == "finalize") return finalize(p[1]);
        if (n == 3 && p[0] == "sessions" && p[2] == "ratings") return add_rating(p[1], body);
    }
    return error_response(404, "not_found", fmt::format("no route for {} /{}", method, fmt::join(p, "/")));
}

HttpResponse AnnotationService::list_datasets() const {
    json out = json::array();
    for (const auto& [name, entry] : registry_) {
        std::size_t shortlisted = 0;
        for (const auto& set : entry.candidates) shortlisted += set.ranked_ids.size();
        out.push_back({{"name", name},
                       {"tweets", entry.dataset.tweets.size()},
                       {"classified", entry.assignment.classified_count()},
                       {"candidates", shortlisted},
                       {"topics", entry.candidates.size()}});
    }
    return json_response(200, out);
}

HttpResponse AnnotationService::dataset_topics(const std::string& name) const {
    const DatasetEntry& e = entry(name);
    const auto histogram = topic_histogram(e.assignment);
    json out = json::array();
    for (const auto& set : e.candidates) {
        auto it = histogram.find(set.topic);
        out.push_back({{"topic", to_string(set.topic)},
                       {"tweets", it == histogram.end() ? 0 : it->second},
                       {"candidates", set.ranked_ids.size()}});
    }
    return json_response(200, out);
}

HttpResponse AnnotationService::dataset_candidates(const std::string& name, const std::string& topic_name) const {
    const DatasetEntry& e = entry(name);
    const TopicLabel topic = topic_param(topic_name);
    auto set = std::find_if(e.candidates.begin(), e.candidates.end(),
                            [&](const CandidateSet& s) { return s.topic == topic; });
    if (set == e.candidates.end()) {
        throw Error(ErrorCode::UnknownDataset, fmt::format("dataset {} has no {} candidates", name, topic_name));
    }
    // Sorted by id: the ranked order must not leak outside a session.
    std::vector<std::size_t> order(set->ranked_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return id_less(set->ranked_ids[a], set->ranked_ids[b]); });
    json tweets = json::array();
    for (std::size_t i : order) {
        tweets.push_back({{"id", set->ranked_ids[i]}, {"text", i < set->texts.size() ? set->texts[i] : ""}});
    }
    return json_response(200, {{"topic", to_string(topic)}, {"source_size", set->source_size}, {"tweets", tweets}});
}

HttpResponse AnnotationService::create_session(const std::string& body) {
    const json in = parse_body(body);
    SessionSpec spec;
    spec.dataset = in.at("dataset").get<std::string>();
    spec.annotator_id = in.at("annotator_id").get<std::string>();
    spec.session_id = in.value("session_id", "");
    if (!spec.session_id.empty() && !valid_name(spec.session_id)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("invalid session id \"{}\"", spec.session_id));
    }
    const std::string mode_text = in.value("mode", "ground_truth");
    const auto mode = parse_session_mode(mode_text);
    if (!mode) throw Error(ErrorCode::InvalidArgument, fmt::format("unknown mode \"{}\"", mode_text));
    spec.mode = *mode;
    spec.budget = in.value("budget", config_.budget);
    spec.allow_short = in.value("allow_short", config_.allow_short);
    spec.seed = in.contains("seed")
                    ? in["seed"].get<std::uint64_t>()
                    : fnv1a(spec.dataset + '\n' + spec.annotator_id + '\n' + std::string(to_string(spec.mode)));
    spec.candidates = entry(spec.dataset).candidates;
    const std::string id = store_->open(std::move(spec)).spec.session_id;
    write_snapshot(id);
    return json_response(201, session_to_json(store_->get(id)));
}

HttpResponse AnnotationService::get_session(const std::string& id) const {
    return json_response(200, session_to_json(store_->get(id)));
}

HttpResponse AnnotationService::toggle(const std::string& id, const std::string& body) {
    const json in = parse_body(body);
    const TopicLabel topic = topic_param(in.at("topic").get<std::string>());
    const bool selected = store_->toggle(id, topic, in.at("tweet_id").get<std::string>());
    write_snapshot(id);
    const AnnotationSession& session = store_->get(id);
    return json_response(200, {{"selected", selected},
                               {"selected_count", session.selected_count()},
                               {"remaining", session.remaining()},
                               {"budget", session.spec.budget}});
}

HttpResponse AnnotationService::finalize(const std::string& id) {
    const FinalizeResult result = store_->finalize(id);
    if (!result.replay) write_snapshot(id);
    return json_response(200, {{"summary", json::parse(summary_to_json(result.summary))}, {"replay", result.replay}});
}

HttpResponse AnnotationService::add_rating(const std::string& id, const std::string& body) {
    json in = parse_body(body);
    in["session_id"] = id;
    const Rating rating = rating_from_json(in);
    store_->add_rating(rating);
    return json_response(201, {{"rating", rating_to_json(rating)},
                               {"aggregate", [&] {
                                    const AggregateRating a = aggregate_ratings(store_->ratings_for(id));
                                    return json{{"coverage", a.coverage},
                                                {"relevance", a.relevance},
                                                {"diversity", a.diversity},
                                                {"count", a.count}};
                                }()}});
}

HttpResponse AnnotationService::export_summary(const std::string& id, const std::string& format) const {
    const AnnotationSession& session = store_->get(id);
    if (!session.summary) {
        throw Error(ErrorCode::SessionOpen, fmt::format("session {} is not finalized", id));
    }
    const auto dir = config_.data_dir / "exports";
    std::filesystem::create_directories(dir);
    if (format == "json") {
        const std::string body = summary_to_json(*session.summary);
        write_atomically(dir / (id + ".json"), body);
        return {200, "application/json", body};
    }
    if (format == "text") {
        const std::string body = summary_to_text(*session.summary, entry(session.spec.dataset).dataset);
        write_atomically(dir / (id + ".txt"), body);
        return {200, "text/plain; charset=utf-8", body};
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown export format \"{}\"", format));
}

Report AnnotationService::report_for(const DatasetEntry& e) const {
    ReportInputs inputs;
    inputs.dataset = &e.dataset;
    inputs.assignment = &e.assignment;
    inputs.candidates = &e.candidates;
    inputs.embeddings = e.embeddings ? &*e.embeddings : nullptr;
    inputs.summaries = e.system_summaries;
    // Only ground truth summaries are references; QA sessions are checks.
    for (const auto& id : store_->session_ids()) {
        const AnnotationSession& session = store_->get(id);
        if (session.spec.dataset != e.name || session.spec.mode != SessionMode::GroundTruth || !session.summary) {
            continue;
        }
        inputs.summaries.push_back(*session.summary);
        auto ratings = store_->ratings_for(id);
        if (!ratings.empty()) inputs.ratings[session.summary->method] = std::move(ratings);
    }
    return build_report(inputs);
}

HttpResponse AnnotationService::report(const std::string& name, const std::string& format) const {
    const Report r = report_for(entry(name));
    if (format == "json") return json_response(200, report_to_json(r));
    if (format == "markdown") return {200, "text/markdown; charset=utf-8", report_to_markdown(r)};
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown report format \"{}\"", format));
}

HttpResponse AnnotationService::verdict(const std::string& annotator) const {
    bool scored = false;
    for (const auto& rating : store_->ratings()) {
        const AnnotationSession* session = store_->find(rating.session_id);
        scored = scored || (session && session->spec.annotator_id == annotator && rating.qa_score);
    }
    if (!scored) {
        return error_response(404, "no_qa_scores", fmt::format("annotator {} has no QA scores", annotator));
    }
    const QaVerdict v = store_->verdict(annotator);
    return json_response(200, {{"annotator_id", v.annotator_id}, {"mean_qa", v.mean_qa}, {"passed", v.passed}});
}

int AnnotationService::bind() {
    server_ = std::make_unique<httplib::Server>();
    // httplib's default adds SO_REUSEPORT, which lets a second instance share
    // the port silently; a busy port must fail instead.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [key, value] : req.params) query.emplace(key, value);
        const HttpResponse out =
            handle(req.method, req.path, query, req.body, req.get_header_value("Authorization"));
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    server_->Get(".*", dispatch);
    server_->Post(".*", dispatch);
    int port = config_.port;
    if (port == 0) {
        port = server_->bind_to_any_port(config_.host);
        if (port < 0) port = 0;
    } else if (!server_->bind_to_port(config_.host, port)) {
        port = 0;
    }
    if (port <= 0) {
        throw Error(ErrorCode::Io, fmt::format("cannot bind {}:{}", config_.host, config_.port));
    }
    spdlog::info("service listening on {}:{}", config_.host, port);
    return port;
}

void AnnotationService::run() {
    if (!server_) throw Error(ErrorCode::InvalidArgument, "bind() must precede run()");
    server_->listen_after_bind();
}

void AnnotationService::stop() {
    if (server_) server_->stop();
}

}  // namespace crisisgt
