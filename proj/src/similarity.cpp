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

#include "cueaudit/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "cueaudit/csv.hpp"
#include "cueaudit/providers.hpp"
#include "cueaudit/random.hpp"
#include "json.hpp"

namespace cueaudit::similarity {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'U', 'E', 'S', 'I', 'M', '0', '1'};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw PreconditionError("similarity threshold must lie in (0, 1], got " +
                            std::to_string(threshold));
  }
}

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw InputError("similarity matrix: truncated binary file");
  return value;
}

}  // namespace

void SimilarityMatrix::set(std::size_t i, std::size_t j, double s) {
  if (i == j || i >= n_ || j >= n_) {
    throw PreconditionError("SimilarityMatrix::set: invalid pair (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
  }
  if (!std::isfinite(s) || s > 1.0 + kSlack || s < -1.0 - kSlack) {
    throw PreconditionError("SimilarityMatrix::set: value out of range: " + std::to_string(s));
  }
  values_[index(i, j)] = s;
}

EmbeddingMatrix stack_rows(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) return EmbeddingMatrix(0, 0);
  const auto dim = vectors.front().size();
  if (dim == 0) throw PreconditionError("stack_rows: zero-dimensional embedding");
  EmbeddingMatrix out(static_cast<Eigen::Index>(vectors.size()), dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim) {
      throw PreconditionError("stack_rows: dimension mismatch at row " + std::to_string(i) +
                              " (" + std::to_string(vectors[i].size()) + " vs " +
                              std::to_string(dim) + ")");
    }
    if (!vectors[i].allFinite()) {
      throw PreconditionError("stack_rows: non-finite value at row " + std::to_string(i));
    }
    out.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
  }
  return out;
}

SimilarityMatrix pairwise_cosine(std::span<const EmbeddingVector> vectors) {
  return pairwise_cosine(stack_rows(vectors));
}

DuplicatePartition partition_at(const SimilarityMatrix& matrix, double threshold,
                                std::vector<std::string> ids) {
  check_threshold(threshold);
  const std::size_t n = matrix.size();
  if (!ids.empty() && ids.size() != n) {
    throw PreconditionError("partition_at: " + std::to_string(ids.size()) + " ids for " +
                            std::to_string(n) + " items");
  }
  UnionFind uf(n);
  std::vector<bool> has_edge(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix(i, j) >= threshold) {
        uf.unite(i, j);
        has_edge[i] = has_edge[j] = true;
      }
    }
  }

  DuplicatePartition p;
  p.threshold = threshold;
  p.item_count = n;
  p.ids = std::move(ids);
  // Keyed by root; members arrive in ascending order, so the map's insertion
  // order by first member gives groups sorted by smallest member.
  std::map<std::size_t, std::size_t> group_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    if (!has_edge[i]) {
      p.uniques.push_back(i);
      continue;
    }
    const std::size_t root = uf.find(i);
    auto [it, inserted] = group_of_root.try_emplace(root, p.groups.size());
    if (inserted) p.groups.emplace_back();
    p.groups[it->second].push_back(i);
  }
  return p;
}

SweepResult threshold_sweep(const SimilarityMatrix& matrix, std::span<const double> thresholds) {
  if (thresholds.empty()) throw PreconditionError("threshold_sweep: no thresholds");
  SweepResult sweep;
  for (double t : thresholds) {
    const auto p = partition_at(matrix, t);
    sweep.records.push_back({t, p.item_count, p.uniques.size(), p.groups.size()});
  }
  return sweep;
}

std::vector<double> hundredths_grid(int lo, int hi, int step) {
  if (step <= 0 || lo <= 0 || hi > 100 || lo > hi) {
    throw PreconditionError("hundredths_grid: need 0 < lo <= hi <= 100 and step > 0");
  }
  std::vector<double> grid;
  for (int k = lo; k <= hi; k += step) grid.push_back(k / 100.0);
  return grid;
}

corpus::Corpus select_representatives(const DuplicatePartition& partition,
                                      const corpus::Corpus& corpus, std::uint64_t seed) {
  if (partition.item_count != corpus.size()) {
    throw PreconditionError("select_representatives: partition covers " +
                            std::to_string(partition.item_count) + " items, corpus has " +
                            std::to_string(corpus.size()));
  }
  for (std::size_t i = 0; i < partition.ids.size(); ++i) {
    if (partition.ids[i] != corpus.items[i].id) {
      throw PreconditionError("select_representatives: id mismatch at index " + std::to_string(i) +
                              " ('" + partition.ids[i] + "' vs '" + corpus.items[i].id + "')");
    }
  }
  std::vector<bool> keep(corpus.size(), false);
  for (auto u : partition.uniques) keep[u] = true;
  Rng rng(seed);
  for (const auto& group : partition.groups) {
    keep[group[rng.uniform_below(group.size())]] = true;
  }
  corpus::Corpus out{corpus.name, {}};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) out.items.push_back(corpus.items[i]);
  }
  return out;
}

std::vector<EmbeddingVector> embed_corpus(const corpus::Corpus& corpus,
                                          providers::EmbeddingClient& client) {
  if (corpus.empty()) throw PreconditionError("embed_corpus: corpus is empty");
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& dp : corpus.items) texts.push_back(dp.raw_text);
  auto vectors = client.embed(texts);
  // Validates dimensions and finiteness.
  (void)stack_rows(vectors);
  return vectors;
}

void write_binary(const SimilarityMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(kMagic, sizeof(kMagic));
  write_le<std::uint64_t>(out, m.size());
  for (double v : m.packed()) write_le<double>(out, v);
}

SimilarityMatrix read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw InputError("'" + path.string() + "' is not a similarity matrix file");
  }
  const auto n = read_le<std::uint64_t>(in);
  SimilarityMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, read_le<double>(in));
  }
  return m;
}

std::string to_triples_csv(const SimilarityMatrix& m) {
  std::ostringstream out;
  out.precision(17);
  out << "i,j,s\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      out << i << ',' << j << ',' << m.packed()[m.index(i, j)] << '\n';
    }
  }
  return out.str();
}

SimilarityMatrix parse_triples_csv(std::string_view content) {
  auto rows = csv::parse(content);
  if (rows.empty() || rows.front() != csv::Row{"i", "j", "s"}) {
    throw InputError("similarity csv: expected header 'i,j,s'");
  }
  std::size_t max_index = 0;
  std::vector<std::tuple<std::size_t, std::size_t, double>> triples;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) throw InputError("similarity csv: row " + std::to_string(r) + " malformed");
    try {
      const auto i = static_cast<std::size_t>(std::stoull(rows[r][0]));
      const auto j = static_cast<std::size_t>(std::stoull(rows[r][1]));
      triples.emplace_back(i, j, std::stod(rows[r][2]));
      max_index = std::max({max_index, i, j});
    } catch (const std::logic_error&) {
      throw InputError("similarity csv: row " + std::to_string(r) + " is not numeric");
    }
  }
  const std::size_t n = triples.empty() ? 0 : max_index + 1;
  SimilarityMatrix m(n);
  if (triples.size() != n * (n - 1) / 2) {
    throw InputError("similarity csv: expected " + std::to_string(n * (n - 1) / 2) +
                     " pairs, found " + std::to_string(triples.size()));
  }
  for (auto [i, j, s] : triples) m.set(i, j, s);
  return m;
}

std::string partition_json(const DuplicatePartition& p) {
  auto name = [&](std::size_t i) -> json {
    if (p.ids.empty()) return i;
    return p.ids[i];
  };
  json groups = json::array();
  for (const auto& g : p.groups) {
    json members = json::array();
    for (auto i : g) members.push_back(name(i));
    groups.push_back(std::move(members));
  }
  json uniques = json::array();
  for (auto i : p.uniques) uniques.push_back(name(i));
  json out = {{"threshold", p.threshold},
              {"item_count", p.item_count},
              {"unique_count", p.uniques.size()},
              {"duplicate_count", p.duplicate_count()},
              {"group_count", p.groups.size()},
              {"groups", std::move(groups)},
              {"uniques", std::move(uniques)}};
  return out.dump(2);
}

std::string sweep_json(const SweepResult& sweep) {
  json rows = json::array();
  for (const auto& r : sweep.records) {
    rows.push_back({{"threshold", r.threshold},
                    {"item_count", r.item_count},
                    {"unique_count", r.unique_count},
                    {"duplicate_count", r.duplicate_count()},
                    {"unique_fraction", r.unique_fraction()},
                    {"duplicate_fraction", r.duplicate_fraction()},
                    {"group_count", r.group_count}});
  }
  return json{{"records", std::move(rows)}}.dump(2);
}

}  // namespace cueaudit::similarity
