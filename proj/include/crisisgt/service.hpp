#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "crisisgt/annotation.hpp"
#include "crisisgt/embeddings.hpp"
#include "crisisgt/error.hpp"
#include "crisisgt/report.hpp"

namespace httplib {
class Server;
}

namespace crisisgt {

// Files of one registered dataset, inside <data_dir>/datasets/<name>/.
inline constexpr const char* kDatasetFile = "dataset.jsonl";
inline constexpr const char* kAssignmentFile = "assignment.json";
inline constexpr const char* kCandidatesFile = "candidates.json";
inline constexpr const char* kEmbeddingsFile = "embeddings.txt";
inline constexpr const char* kSummariesDir = "summaries";

struct DatasetEntry {
    std::string name;
    Dataset dataset;
    TopicAssignment assignment;
    std::vector<CandidateSet> candidates;
    /// Machine summaries from summaries/*.json, shown in reports.
    std::vector<SummaryRecord> system_summaries;
    std::optional<EmbeddingTable> embeddings;
};

DatasetEntry load_dataset_entry(const std::filesystem::path& dir);
/// Every subdirectory of <data_dir>/datasets, sorted by name.
std::vector<DatasetEntry> load_registry(const std::filesystem::path& data_dir);

struct ApiConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir;
    /// When set, requests need "Authorization: Bearer <token>".
    std::optional<std::string> token;
    std::size_t budget = 40;
    bool allow_short = false;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

// The annotation API. Mutations are appended to <data_dir>/events.jsonl
// (fsync before the response) and mirrored to snapshots/<session>.json.
// Construction replays the log and throws Error(CorruptLog) on a bad line.
class AnnotationService {
public:
    AnnotationService(ApiConfig config, std::vector<DatasetEntry> registry, Clock clock = utc_timestamp);
    ~AnnotationService();

    /// Transport-independent dispatch. Query values are already decoded.
    HttpResponse handle(const std::string& method, const std::string& path,
                        const std::map<std::string, std::string>& query, const std::string& body,
                        const std::string& authorization = "");

    /// Binds the configured address (port 0 picks one) and returns the port.
    /// Throws Error(Io) when the bind fails.
    int bind();
    /// Serves until stop(); call after bind().
    void run();
    void stop();

    const SessionStore& store() const { return *store_; }

private:
    HttpResponse route(const std::string& method, const std::vector<std::string>& parts,
                       const std::map<std::string, std::string>& query, const std::string& body);
    const DatasetEntry& entry(const std::string& name) const;
    void write_snapshot(const std::string& session_id) const;
    Report report_for(const DatasetEntry& entry) const;

    HttpResponse list_datasets() const;
    HttpResponse dataset_topics(const std::string& name) const;
    HttpResponse dataset_candidates(const std::string& name, const std::string& topic) const;
    HttpResponse create_session(const std::string& body);
    HttpResponse get_session(const std::string& id) const;
    HttpResponse toggle(const std::string& id, const std::string& body);
    HttpResponse finalize(const std::string& id);
    HttpResponse add_rating(const std::string& id, const std::string& body);
    HttpResponse export_summary(const std::string& id, const std::string& format) const;
    HttpResponse report(const std::string& name, const std::string& format) const;
    HttpResponse verdict(const std::string& annotator) const;

    ApiConfig config_;
    std::map<std::string, DatasetEntry> registry_;
    std::unique_ptr<EventLog> log_;
    // Mutations hold the lock exclusively, so log appends and state changes
    // are applied in one total order; reads share it.
    mutable std::shared_mutex mutex_;
    std::unique_ptr<SessionStore> store_;
    std::unique_ptr<httplib::Server> server_;
};

/// Status code for an error, e.g. 409 for BudgetExceeded.
int http_status(ErrorCode code);

}  // namespace crisisgt
