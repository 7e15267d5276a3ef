#pragma once

// Greedy redundancy pruning over sentence embeddings.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace multipun::divfilter {

// Stored on the diagonal of a DistanceMatrix and reported as d_min when a
// single candidate survives.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws DomainError on ragged rows, non-finite components or zero-norm
  // rows, and ArgumentError when ids and rows disagree in length.
  EmbeddingMatrix(std::vector<std::string> ids, std::vector<std::vector<double>> rows);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> rows_;
  std::size_t dim_ = 0;
};

class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) data_[i * n + i] = kInfinity;
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double d) {
    data_[i * n_ + j] = d;
    data_[j * n_ + i] = d;
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

// 1 - cos(e_i, e_j), clamped to [0, 2]. `threads` > 1 splits rows across
// workers; the result does not depend on it.
DistanceMatrix cosine_distance_matrix(const EmbeddingMatrix& e, unsigned threads = 1);

// One pruning step, recorded when a trace is requested.
struct PruneStep {
  std::size_t i = 0;
  std::size_t j = 0;
  double d_ij = 0.0;
  double phi_i = 0.0;
  double phi_j = 0.0;
  std::size_t removed = 0;
  std::size_t active_before = 0;
};

struct FilterResult {
  std::vector<std::string> kept_ids;   // original order
  std::vector<std::size_t> kept_rows;  // indices into the input
  double d_min = kInfinity;
  std::vector<PruneStep> trace;
};

// Removes N - k candidates. Each step takes the closest active pair (ties to
// the lexicographically smallest (i, j)), scores both members by the sum of
// distances to the other active candidates, and drops the lower-scoring one
// (ties drop the larger index). Throws ArgumentError unless 1 <= k <= N.
FilterResult diversity_filter(const EmbeddingMatrix& e, std::size_t k, bool record_trace = false);
FilterResult diversity_filter(const DistanceMatrix& d, const std::vector<std::string>& ids,
                              std::size_t k, bool record_trace = false);

// Smallest off-diagonal entry among `rows`; kInfinity for fewer than two.
double min_pairwise(const DistanceMatrix& d, const std::vector<std::size_t>& rows);

}  // namespace multipun::divfilter
