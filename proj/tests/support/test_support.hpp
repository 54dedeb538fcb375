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

// Shared oracles and generators for the unit and acceptance tests. Nothing
// here calls into the library's algorithms; every oracle is an independent
// re-derivation.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cueaudit/corpus.hpp"
#include "cueaudit/csv.hpp"
#include "cueaudit/error.hpp"
#include "cueaudit/random.hpp"
#include "cueaudit/report.hpp"

namespace cueaudit::support {

inline corpus::Corpus make_corpus(const std::vector<std::string>& texts, std::string name = "t") {
  corpus::Corpus c{name, {}};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    c.items.push_back({name + ":" + std::to_string(i), texts[i], texts[i], "custom"});
  }
  return c;
}

// Connected components of the graph {(i,j) : s(i,j) >= theta} by repeated
// transitive closure over a dense reachability matrix. Returns components of
// size >= 2 (sorted, ordered by smallest member) and the isolated vertices.
template <typename Similarity>
std::pair<std::vector<std::vector<std::size_t>>, std::vector<std::size_t>> closure_components(
    std::size_t n, Similarity&& s, double theta) {
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && s(i, j) >= theta) reach[i][j] = 1;
    }
  }
  // Warshall.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;

  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> uniques;
  std::vector<char> seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) {
        members.push_back(j);
        seen[j] = 1;
      }
    }
    if (members.size() == 1) {
      uniques.push_back(i);
    } else {
      groups.push_back(std::move(members));
    }
  }
  return {groups, uniques};
}

// Synthetic embedding set with planted near-duplicates: a few random cluster
// centres, each member a small perturbation of its centre, plus lone points.
inline std::vector<Eigen::VectorXd> clustered_vectors(Rng& rng, std::size_t n, int dim) {
  auto gaussianish = [&] {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += rng.uniform01() - 0.5;
    return acc;
  };
  const std::size_t centres = 1 + rng.uniform_below(std::max<std::size_t>(1, n / 3));
  std::vector<Eigen::VectorXd> centre(centres, Eigen::VectorXd(dim));
  for (auto& c : centre)
    for (int d = 0; d < dim; ++d) c(d) = gaussianish();

  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd v(dim);
    if (rng.uniform01() < 0.7) {
      const auto& c = centre[rng.uniform_below(centres)];
      const double noise = 0.05 + 0.6 * rng.uniform01();
      for (int d = 0; d < dim; ++d) v(d) = c(d) + noise * gaussianish();
    } else {
      for (int d = 0; d < dim; ++d) v(d) = gaussianish();
    }
    if (v.norm() == 0.0) v(0) = 1.0;
    out.push_back(v);
  }
  return out;
}

inline double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double dot = 0, na = 0, nb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    dot += a(i) * b(i);
    na += a(i) * a(i);
    nb += b(i) * b(i);
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Brute-force n-gram counts: whitespace tokens, every window of length n.
inline std::map<std::string, std::uint64_t> sliding_windows(
    const std::vector<std::vector<std::string>>& docs, std::size_t n) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& toks : docs) {
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      std::string key = toks[i];
      for (std::size_t j = 1; j < n; ++j) key += " " + toks[i + j];
      ++out[key];
    }
  }
  return out;
}

inline std::vector<std::string> random_tokens(Rng& rng, std::size_t count, std::size_t vocab) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back("w" + std::to_string(rng.uniform_below(vocab)));
  return out;
}

inline std::string join(const std::vector<std::string>& toks, const std::string& sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) out += (i ? sep : "") + toks[i];
  return out;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cueaudit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Published campaign table: per dataset, model rows in file order plus the
// Mean row.
struct PublishedTable {
  std::vector<report::CampaignRow> models;
  report::CampaignRow mean;
};

inline std::map<std::string, PublishedTable> load_published_table(const std::filesystem::path& p) {
  const auto rows = csv::parse(read_file(p));
  if (rows.empty()) throw InputError("empty table " + p.string());
  std::map<std::string, PublishedTable> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 7) throw InputError("table row " + std::to_string(i) + " has wrong width");
    auto& table = out[r[0]];
    report::CampaignRow* row = nullptr;
    if (r[1] == "Mean") {
      row = &table.mean;
    } else {
      auto it = std::find_if(table.models.begin(), table.models.end(),
                             [&](const auto& m) { return m.name == r[1]; });
      row = it == table.models.end() ? &table.models.emplace_back() : &*it;
    }
    row->name = r[1];
    row->baseline_asr = std::stod(r[2]);
    const auto k = static_cast<std::size_t>(std::stoul(r[3]));
    if (k != row->iterations.size() + 1) throw InputError("table iterations out of order");
    row->iterations.push_back({std::stod(r[4]), std::stod(r[5]), std::stod(r[6])});
  }
  return out;
}

}  // namespace cueaudit::support
