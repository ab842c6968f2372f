#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ctdg {

// Probability a uniformly random positive outscores a random negative;
// ties count one half. Requires at least one of each class.
double auc(std::span<const double> scores, std::span<const int> labels);

struct RankedQuery {
  std::vector<double> scores;
  std::vector<double> relevance;
};

// Mean reciprocal rank over queries with exactly one relevant candidate;
// descending-score ranking with stable index tie-breaks.
double mrr(std::span<const RankedQuery> queries);

// Exponential-gain NDCG over the predicted order (stable ties); cutoff = 0
// means the full list.
double ndcg(const RankedQuery& query, std::size_t cutoff = 0);

}  // namespace ctdg
