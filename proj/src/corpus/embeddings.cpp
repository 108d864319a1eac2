#include "crisisgt/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crisisgt/error.hpp"

namespace crisisgt {

namespace {

std::string fold(std::string_view token) {
    std::string out(token);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string field;
    while (in >> field) fields.push_back(field);
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool is_count(const std::string& text) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

bool EmbeddingTable::set(std::string_view token, std::vector<double> vector) {
    if (dimension_ == 0) dimension_ = vector.size();
    if (vector.size() != dimension_ || dimension_ == 0) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("vector for \"{}\" has dimension {}, expected {}", token, vector.size(),
                                dimension_));
    }
    auto [it, inserted] = vectors_.insert_or_assign(fold(token), std::move(vector));
    return !inserted;
}

const std::vector<double>* EmbeddingTable::find(std::string_view token) const {
    auto it = vectors_.find(fold(token));
    return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<double> EmbeddingTable::mean(const std::vector<std::string>& tokens) const {
    std::vector<double> sum(dimension_, 0.0);
    std::size_t found = 0;
    for (const auto& token : tokens) {
        if (const auto* v = find(token)) {
            for (std::size_t d = 0; d < dimension_; ++d) sum[d] += (*v)[d];
            ++found;
        }
    }
    if (found > 0) {
        for (double& x : sum) x /= static_cast<double>(found);
    }
    return sum;
}

EmbeddingLoadReport load_embeddings_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read embeddings {}", path.string()));

    EmbeddingLoadReport report;
    std::size_t dimension = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (line_no == 1 && fields.size() == 2 && is_count(fields[0]) && is_count(fields[1])) {
            dimension = std::stoul(fields[1]);
            continue;
        }
        if (dimension == 0) dimension = fields.size() - 1;
        std::vector<double> vector;
        bool ok = dimension > 0 && fields.size() == dimension + 1;
        for (std::size_t i = 1; ok && i < fields.size(); ++i) {
            double value = 0.0;
            ok = parse_double(fields[i], value);
            vector.push_back(value);
        }
        if (!ok) {
            ++report.malformed;
            spdlog::warn("{}:{}: expected a token and {} numbers, skipped", path.string(), line_no, dimension);
            continue;
        }
        if (report.table.set(fields[0], std::move(vector))) {
            ++report.duplicates;
            spdlog::warn("{}:{}: duplicate token \"{}\", keeping the later vector", path.string(), line_no,
                         fields[0]);
        }
    }
    if (report.malformed > 0) {
        spdlog::warn("{}: skipped {} malformed line(s)", path.string(), report.malformed);
    }
    return report;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    return load_embeddings_report(path).table;
}

double dense_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace crisisgt
