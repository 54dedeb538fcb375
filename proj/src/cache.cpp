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

#include <fstream>
#include <sstream>

#include "cueaudit/providers.hpp"

namespace cueaudit::providers {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(std::optional<fs::path> dir) : dir_(std::move(dir)) {
  if (dir_) fs::create_directories(*dir_);
}

fs::path ResponseCache::path_for(const std::string& key) const {
  return *dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<nlohmann::json> ResponseCache::get(const std::string& key) {
  {
    std::shared_lock lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  const auto path = path_for(key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json payload;
  try {
    payload = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw CacheCorruption("cache file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  std::unique_lock lock(mu_);
  memory_.insert_or_assign(key, payload);
  return payload;
}

void ResponseCache::put(const std::string& key, const nlohmann::json& payload) {
  if (dir_) {
    const auto path = path_for(key);
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(tmp_counter_.fetch_add(1)) + "." +
           std::to_string(reinterpret_cast<std::uintptr_t>(this));
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw Error("cannot write cache file '" + tmp.string() + "'");
      out << payload.dump();
      if (!out.flush()) throw Error("short write to cache file '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
  }
  std::unique_lock lock(mu_);
  memory_.insert_or_assign(key, payload);
}

}  // namespace cueaudit::providers
