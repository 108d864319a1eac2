#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "crisisgt/error.hpp"
#include "summarizers/internal.hpp"

namespace crisisgt::detail {

namespace {

constexpr double kRankTolerance = 1e-10;

}  // namespace

Positions lsa(const Dataset& dataset, const TermIndex& index, std::size_t k) {
    const auto n = static_cast<Eigen::Index>(index.size());
    const auto vocab = static_cast<Eigen::Index>(index.vocabulary_size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(vocab, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (const auto& [term, w] : index.weights(static_cast<std::size_t>(j)).entries) a(term, j) = w;
    }
    if (vocab == 0 || a.cwiseAbs().maxCoeff() == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "LSA needs a TF-IDF matrix with at least one non-zero weight");
    }

    // Right singular vectors (columns of v) with singular values, decreasing.
    Eigen::MatrixXd v;
    Eigen::VectorXd sigma;
    if (n <= vocab) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.transpose() * a);
        sigma = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().reverse();
        v = solver.eigenvectors().rowwise().reverse();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a * a.transpose());
        sigma = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().reverse();
        const Eigen::MatrixXd u = solver.eigenvectors().rowwise().reverse();
        v = Eigen::MatrixXd::Zero(n, sigma.size());
        for (Eigen::Index c = 0; c < sigma.size(); ++c) {
            if (sigma(c) > 0.0) v.col(c) = a.transpose() * u.col(c) / sigma(c);
        }
    }
    Eigen::Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > kRankTolerance * sigma(0)) ++rank;

    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    Positions picked;
    for (Eigen::Index step = 0; picked.size() < k; ++step) {
        const Eigen::Index c = step % rank;
        std::optional<std::size_t> best;
        double best_value = -1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (taken[static_cast<std::size_t>(j)]) continue;
            const double value = std::abs(v(j, c));
            if (value > best_value) {
                best_value = value;
                best = static_cast<std::size_t>(j);
            }
        }
        taken[*best] = true;
        picked.push_back(*best);
    }
    (void)dataset;
    return picked;
}

}  // namespace crisisgt::detail

namespace crisisgt {

SummaryRecord lsa_select(const Dataset& dataset, std::size_t budget) {
    return summarize(Method::Lsa, dataset, budget);
}

}  // namespace crisisgt
