#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crisisgt {

// Word vectors of a single dimension. Lookup folds ASCII case.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }

    /// Returns true when an existing vector was replaced. Throws
    /// Error(InvalidArgument) on a dimension mismatch.
    bool set(std::string_view token, std::vector<double> vector);
    const std::vector<double>* find(std::string_view token) const;

    /// Mean of the vectors of in-vocabulary tokens; zero vector when none.
    std::vector<double> mean(const std::vector<std::string>& tokens) const;

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

struct EmbeddingLoadReport {
    EmbeddingTable table;
    std::size_t malformed = 0;
    std::size_t duplicates = 0;
};

/// Text format: "token v1 ... vD" per line. An optional word2vec header line
/// "count dimension" is skipped. Lines of the wrong arity or with bad numbers
/// are skipped with a warning; a repeated token keeps its last vector.
EmbeddingLoadReport load_embeddings_report(const std::filesystem::path& path);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

/// Cosine of dense vectors; zero when either has zero norm.
double dense_cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace crisisgt
