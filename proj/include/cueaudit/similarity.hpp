// Copyright 2026 The cueaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cueaudit/corpus.hpp"
#include "cueaudit/embedding.hpp"
#include "cueaudit/error.hpp"

namespace cueaudit::providers {
class EmbeddingClient;
}

namespace cueaudit::similarity {

// Strict upper triangle of a symmetric cosine-similarity matrix, packed
// row-major: (0,1), (0,2), ..., (0,n-1), (1,2), ...
class SimilarityMatrix {
 public:
  static constexpr double kSlack = 1e-9;
  static constexpr double kParallelTolerance = 1e-12;

  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n) : n_(n), values_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

  std::size_t size() const { return n_; }
  std::span<const double> packed() const { return values_; }

  // Symmetric access for i != j, clamped to [-1, 1].
  double operator()(std::size_t i, std::size_t j) const {
    const double s = values_[index(i, j)];
    return s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
  }

  // Stores s(i, j); values outside [-1 - kSlack, 1 + kSlack] or non-finite
  // are rejected.
  void set(std::size_t i, std::size_t j, double s);

  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    // Row i starts after i*(2n - i - 1)/2 entries.
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Stacks equal-length, finite vectors into an n x dim matrix.
EmbeddingMatrix stack_rows(std::span<const EmbeddingVector> vectors);

// s(i,j) = <v_i, v_j> / (|v_i| |v_j|) in double precision, one row per item.
template <typename Derived>
SimilarityMatrix pairwise_cosine(const Eigen::MatrixBase<Derived>& rows) {
  const auto n = static_cast<std::size_t>(rows.rows());
  if (n < 2) throw PreconditionError("pairwise_cosine: need at least 2 vectors");
  const Eigen::MatrixXd x = rows.template cast<double>();
  if (!x.allFinite()) throw PreconditionError("pairwise_cosine: non-finite embedding value");
  const Eigen::VectorXd norms = x.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms(i) > 0.0)) {
      throw PreconditionError("pairwise_cosine: zero-norm vector at row " + std::to_string(i));
    }
  }
  const Eigen::MatrixXd gram = x * x.transpose();
  SimilarityMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      double s = gram(ii, jj) / (norms(ii) * norms(jj));
      // Parallel rows can land a few ulps under 1; snap them so s = 1 passes
      // a threshold of exactly 1.
      if (s > 1.0 - SimilarityMatrix::kParallelTolerance) s = 1.0;
      s = std::fmax(-1.0, s);
      out.set(i, j, s);
    }
  }
  return out;
}

SimilarityMatrix pairwise_cosine(std::span<const EmbeddingVector> vectors);

// Threshold-graph partition: edge (i,j) iff s(i,j) >= threshold; groups are
// connected components of size >= 2, uniques are isolated vertices. Indices
// refer to corpus order; groups are sorted by their smallest member.
struct DuplicatePartition {
  double threshold = 0.9;
  std::size_t item_count = 0;
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> uniques;
  // Item ids in index order; empty when the partition was built without ids.
  std::vector<std::string> ids;

  std::size_t duplicate_count() const { return item_count - uniques.size(); }
};

DuplicatePartition partition_at(const SimilarityMatrix& matrix, double threshold,
                                std::vector<std::string> ids = {});

struct SweepRecord {
  double threshold = 0.0;
  std::size_t item_count = 0;
  std::size_t unique_count = 0;
  std::size_t group_count = 0;

  std::size_t duplicate_count() const { return item_count - unique_count; }
  double unique_fraction() const {
    return item_count ? static_cast<double>(unique_count) / static_cast<double>(item_count) : 0.0;
  }
  double duplicate_fraction() const {
    return item_count ? static_cast<double>(duplicate_count()) / static_cast<double>(item_count)
                      : 0.0;
  }
};

struct SweepResult {
  std::vector<SweepRecord> records;
};

SweepResult threshold_sweep(const SimilarityMatrix& matrix, std::span<const double> thresholds);

// Thresholds lo/100, (lo+step)/100, ..., hi/100, built from integer
// hundredths so the grid has no accumulated drift. 70..99 gives 30 values.
std::vector<double> hundredths_grid(int lo, int hi, int step = 1);

// All uniques plus one uniformly chosen member per group, corpus order kept.
corpus::Corpus select_representatives(const DuplicatePartition& partition,
                                      const corpus::Corpus& corpus, std::uint64_t seed);

// Embeds each item's raw text; one vector per item in corpus order.
std::vector<EmbeddingVector> embed_corpus(const corpus::Corpus& corpus,
                                          providers::EmbeddingClient& client);

// Persistence. Binary layout: "CUESIM01", u64 n, then n(n-1)/2 little-endian
// doubles in packed order. CSV: header "i,j,s" then one triple per pair.
void write_binary(const SimilarityMatrix& m, const std::filesystem::path& path);
SimilarityMatrix read_binary(const std::filesystem::path& path);
std::string to_triples_csv(const SimilarityMatrix& m);
SimilarityMatrix parse_triples_csv(std::string_view content);

std::string partition_json(const DuplicatePartition& p);
std::string sweep_json(const SweepResult& sweep);

}  // namespace cueaudit::similarity
