#include "ctdg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ctdg {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("auc: size mismatch");
  std::size_t pos = 0, neg = 0;
  for (int l : labels) (l != 0 ? pos : neg) += 1;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("auc: need both classes");

  // Mann-Whitney rank sum with average ranks over ties.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] != 0) pos_rank_sum += avg_rank;
    i = j;
  }
  const double u_stat =
      pos_rank_sum - static_cast<double>(pos) * (static_cast<double>(pos) + 1.0) / 2.0;
  return u_stat / (static_cast<double>(pos) * static_cast<double>(neg));
}

namespace {

// Descending-score order with stable index tie-breaks.
std::vector<std::size_t> ranking(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

}  // namespace

double mrr(std::span<const RankedQuery> queries) {
  if (queries.empty()) throw std::invalid_argument("mrr: no queries");
  double sum = 0.0;
  for (const RankedQuery& q : queries) {
    if (q.scores.size() != q.relevance.size())
      throw std::invalid_argument("mrr: size mismatch");
    std::size_t relevant = q.scores.size();
    std::size_t count = 0;
    for (std::size_t i = 0; i < q.relevance.size(); ++i)
      if (q.relevance[i] > 0.0) {
        relevant = i;
        ++count;
      }
    if (count != 1)
      throw std::invalid_argument("mrr: each query needs exactly one relevant");
    const std::vector<std::size_t> order = ranking(q.scores);
    for (std::size_t rank = 0; rank < order.size(); ++rank)
      if (order[rank] == relevant) {
        sum += 1.0 / static_cast<double>(rank + 1);
        break;
      }
  }
  return sum / static_cast<double>(queries.size());
}

double ndcg(const RankedQuery& query, std::size_t cutoff) {
  if (query.scores.size() != query.relevance.size())
    throw std::invalid_argument("ndcg: size mismatch");
  if (query.scores.empty()) throw std::invalid_argument("ndcg: empty query");
  bool any_positive = false;
  for (double r : query.relevance) {
    if (r < 0.0) throw std::invalid_argument("ndcg: negative relevance");
    if (r > 0.0) any_positive = true;
  }
  if (!any_positive) throw std::invalid_argument("ndcg: all-zero relevance");
  const std::size_t k = cutoff == 0 ? query.scores.size()
                                    : std::min(cutoff, query.scores.size());

  const auto dcg = [&](const std::vector<std::size_t>& order) {
    double acc = 0.0;
    for (std::size_t pos = 0; pos < k; ++pos) {
      const double gain = std::pow(2.0, query.relevance[order[pos]]) - 1.0;
      acc += gain / std::log2(static_cast<double>(pos) + 2.0);
    }
    return acc;
  };

  const std::vector<std::size_t> predicted = ranking(query.scores);
  std::vector<std::size_t> ideal(query.scores.size());
  std::iota(ideal.begin(), ideal.end(), 0);
  std::stable_sort(ideal.begin(), ideal.end(), [&](std::size_t a, std::size_t b) {
    return query.relevance[a] > query.relevance[b];
  });
  return dcg(predicted) / dcg(ideal);
}

}  // namespace ctdg
