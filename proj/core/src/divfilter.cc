#include "multipun/divfilter.h"

#include <algorithm>
#include <cmath>

#include "multipun/error.h"
#include "multipun/parallel.h"

namespace multipun::divfilter {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids,
                                 std::vector<std::vector<double>> rows)
    : ids_(std::move(ids)), rows_(std::move(rows)) {
  if (ids_.size() != rows_.size()) {
    throw ArgumentError("embedding ids and rows differ in length");
  }
  if (rows_.empty()) throw ArgumentError("embedding matrix needs at least one row");
  dim_ = rows_.front().size();
  if (dim_ == 0) throw DomainError("embedding dimension must be positive");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (r.size() != dim_) throw DomainError("ragged embedding row " + ids_[i]);
    double norm2 = 0.0;
    for (double x : r) {
      if (!std::isfinite(x)) throw DomainError("non-finite component in row " + ids_[i]);
      norm2 += x * x;
    }
    if (norm2 == 0.0) throw DomainError("zero-norm embedding row " + ids_[i]);
  }
}

DistanceMatrix cosine_distance_matrix(const EmbeddingMatrix& e, unsigned threads) {
  const std::size_t n = e.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double x : e.row(i)) s += x * x;
    norms[i] = std::sqrt(s);
  }
  DistanceMatrix d(n);
  // Row i owns the cells (i, j > i), so workers never write the same cell.
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& a = e.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = e.row(j);
      double dot = 0.0;
      for (std::size_t t = 0; t < a.size(); ++t) dot += a[t] * b[t];
      double dist = 1.0 - dot / (norms[i] * norms[j]);
      d.set(i, j, std::clamp(dist, 0.0, 2.0));
    }
  });
  return d;
}

double min_pairwise(const DistanceMatrix& d, const std::vector<std::size_t>& rows) {
  double best = kInfinity;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) best = std::min(best, d(rows[a], rows[b]));
  }
  return best;
}

FilterResult diversity_filter(const EmbeddingMatrix& e, std::size_t k, bool record_trace) {
  return diversity_filter(cosine_distance_matrix(e), e.ids(), k, record_trace);
}

FilterResult diversity_filter(const DistanceMatrix& d, const std::vector<std::string>& ids,
                              std::size_t k, bool record_trace) {
  const std::size_t n = d.size();
  if (ids.size() != n) throw ArgumentError("ids do not match the distance matrix");
  if (k < 1 || k > n) {
    throw ArgumentError("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  }

  std::vector<char> active(n, 1);
  // nn[i] is the closest active j > i (smallest j on ties); npos when none.
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> nn(n, npos);
  std::vector<double> nn_dist(n, kInfinity);
  auto refresh = [&](std::size_t i) {
    nn[i] = npos;
    nn_dist[i] = kInfinity;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (active[j] && (nn[i] == npos || d(i, j) < nn_dist[i])) {
        nn[i] = j;
        nn_dist[i] = d(i, j);
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  auto phi = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (active[m] && m != i) s += d(i, m);
    }
    return s;
  };

  FilterResult result;
  std::size_t remaining = n;
  while (remaining > k) {
    std::size_t i = npos;
    for (std::size_t r = 0; r < n; ++r) {
      if (active[r] && nn[r] != npos && (i == npos || nn_dist[r] < nn_dist[i])) i = r;
    }
    const std::size_t j = nn[i];
    const double phi_i = phi(i);
    const double phi_j = phi(j);
    const std::size_t victim = phi_i < phi_j ? i : j;

    if (record_trace) {
      result.trace.push_back({i, j, d(i, j), phi_i, phi_j, victim, remaining});
    }
    active[victim] = 0;
    --remaining;
    nn[victim] = npos;
    for (std::size_t r = 0; r < victim; ++r) {
      if (active[r] && nn[r] == victim) refresh(r);
    }
  }

  for (std::size_t r = 0; r < n; ++r) {
    if (!active[r]) continue;
    result.kept_rows.push_back(r);
    result.kept_ids.push_back(ids[r]);
  }
  result.d_min = min_pairwise(d, result.kept_rows);
  return result;
}

}  // namespace multipun::divfilter
