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

#include "cueaudit/config.hpp"

#include <fstream>
#include <sstream>

#include "cueaudit/error.hpp"
#include "cueaudit/mock.hpp"

namespace cueaudit::config {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

ModelRef parse_model(const json& j, const std::string& role, int default_cap,
                     providers::ReasoningEffort default_effort) {
  if (!j.is_object()) throw ConfigError("models." + role + " must be an object");
  ModelRef m;
  m.provider = get_or<std::string>(j, "provider", "");
  m.spec.model_id = get_or<std::string>(j, "model", "");
  if (m.provider.empty() || m.spec.model_id.empty()) {
    throw ConfigError("models." + role + " needs 'provider' and 'model'");
  }
  m.name = get_or<std::string>(j, "name", m.spec.model_id);
  m.spec.max_output_tokens = get_or<int>(j, "max_output_tokens", default_cap);
  m.spec.effort = j.contains("reasoning_effort")
                      ? providers::parse_effort(j["reasoning_effort"].get<std::string>())
                      : default_effort;
  if (j.contains("temperature")) m.spec.sampling.temperature = j["temperature"].get<double>();
  if (j.contains("top_p")) m.spec.sampling.top_p = j["top_p"].get<double>();
  return m;
}

std::optional<fs::path> opt_path(const json& j, const char* key, const fs::path& base) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return resolve(base, j[key].get<std::string>());
}

}  // namespace

Settings parse_settings(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  Settings s;
  s.raw = j;
  using providers::ReasoningEffort;

  try {
    if (j.contains("providers")) {
      for (const auto& [name, p] : j["providers"].items()) {
        ProviderSettings ps;
        ps.name = name;
        ps.kind = get_or<std::string>(p, "kind", "");
        if (ps.kind != "openai" && ps.kind != "mock" && ps.kind != "hashed" &&
            ps.kind != "http-embedding") {
          throw ConfigError("provider '" + name + "': unknown kind '" + ps.kind + "'");
        }
        ps.options = p;
        if (p.contains("script")) ps.options["script"] = resolve(base_dir, p["script"]).string();
        ps.rate_per_second = get_or<double>(p, "rate_per_second", ps.kind == "openai" ? 2.0 : 0.0);
        ps.burst = get_or<double>(p, "burst", 4.0);
        s.providers.emplace(name, std::move(ps));
      }
    }
    if (!s.providers.contains("hashed")) s.providers.emplace("hashed", ProviderSettings{"hashed", "hashed", json::object(), 0.0, 1.0});

    if (j.contains("models")) {
      const auto& m = j["models"];
      if (m.contains("launderer")) s.launderer = parse_model(m["launderer"], "launderer", 2048, ReasoningEffort::none);
      if (m.contains("criteria")) s.criteria = parse_model(m["criteria"], "criteria", 1024, ReasoningEffort::standard);
      if (m.contains("judge")) s.judge = parse_model(m["judge"], "judge", 1024, ReasoningEffort::standard);
      if (m.contains("targets")) {
        for (const auto& t : m["targets"]) s.targets.push_back(parse_model(t, "targets", 4096, ReasoningEffort::standard));
      }
      if (!s.criteria && s.launderer) {
        s.criteria = *s.launderer;
        s.criteria->spec.max_output_tokens = 1024;
        s.criteria->spec.effort = ReasoningEffort::standard;
      }
    }
    if (j.contains("embedding")) {
      s.embedding_provider = get_or<std::string>(j["embedding"], "provider", s.embedding_provider);
      s.embedding_batch = get_or<std::size_t>(j["embedding"], "batch_size", s.embedding_batch);
    }
    if (j.contains("templates")) {
      for (const auto& [kind, path] : j["templates"].items()) {
        s.templates[kind] = resolve(base_dir, path.get<std::string>());
      }
    }
    s.demos = opt_path(j, "demos", base_dir);
    s.criteria_demos = opt_path(j, "criteria_demos", base_dir);
    if (j.contains("campaign")) {
      const auto& c = j["campaign"];
      s.max_iterations = get_or<int>(c, "max_iterations", s.max_iterations);
      if (c.contains("target_asr") && !c["target_asr"].is_null()) s.target_asr = c["target_asr"].get<double>();
      s.demo_count = get_or<std::size_t>(c, "demo_count", s.demo_count);
      s.workers = get_or<std::size_t>(c, "workers", s.workers);
      if (c.contains("pe_base")) s.pe_base = metrics::parse_practicality_base(c["pe_base"].get<std::string>());
      if (c.contains("mean_asr_rule")) s.mean_asr_rule = report::parse_mean_asr_rule(c["mean_asr_rule"].get<std::string>());
    }
    if (j.contains("retry")) {
      const auto& r = j["retry"];
      s.retry.max_retries = get_or<int>(r, "max_retries", s.retry.max_retries);
      s.retry.initial_delay = std::chrono::milliseconds(get_or<long>(r, "initial_delay_ms", s.retry.initial_delay.count()));
      s.retry.max_delay = std::chrono::milliseconds(get_or<long>(r, "max_delay_ms", s.retry.max_delay.count()));
      s.retry.multiplier = get_or<double>(r, "multiplier", s.retry.multiplier);
      s.retry.jitter = get_or<double>(r, "jitter", s.retry.jitter);
    }
    if (j.contains("dedup")) {
      const auto& d = j["dedup"];
      s.dedup.threshold = get_or<double>(d, "threshold", s.dedup.threshold);
      s.dedup.sweep_lo = get_or<int>(d, "sweep_lo", s.dedup.sweep_lo);
      s.dedup.sweep_hi = get_or<int>(d, "sweep_hi", s.dedup.sweep_hi);
      s.dedup.sweep_step = get_or<int>(d, "sweep_step", s.dedup.sweep_step);
    }
    if (j.contains("ngrams")) {
      const auto& n = j["ngrams"];
      s.ngrams.k = get_or<std::size_t>(n, "k", s.ngrams.k);
      s.ngrams.orders = get_or<std::vector<std::size_t>>(n, "orders", s.ngrams.orders);
      s.ngrams.stopwords = opt_path(n, "stopwords", base_dir);
      s.ngrams.instruction_words = opt_path(n, "instruction_words", base_dir);
      s.ngrams.lexicon = opt_path(n, "lexicon", base_dir);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InputError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (s.max_iterations < 1) throw ConfigError("campaign.max_iterations must be >= 1");
  if (!s.providers.contains(s.embedding_provider)) {
    throw ConfigError("embedding provider '" + s.embedding_provider + "' is not defined");
  }
  for (const auto* m : {&s.launderer, &s.criteria, &s.judge}) {
    if (*m && !s.providers.contains((*m)->provider)) {
      throw ConfigError("model '" + (*m)->name + "' uses undefined provider '" + (*m)->provider + "'");
    }
  }
  for (const auto& t : s.targets) {
    if (!s.providers.contains(t.provider)) {
      throw ConfigError("target '" + t.name + "' uses undefined provider '" + t.provider + "'");
    }
  }
  return s;
}

Settings load_settings(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_settings(j, fs::absolute(path).parent_path());
}

Settings default_settings() { return parse_settings(json::object(), fs::current_path()); }

Registry::Registry(Settings settings, RegistryOptions options)
    : settings_(std::move(settings)), options_(std::move(options)) {
  cache_ = std::make_shared<providers::ResponseCache>(options_.cache_dir);
}

std::shared_ptr<providers::Transport> Registry::transport() {
  if (!transport_) {
    if (options_.offline) {
      transport_ = std::make_shared<providers::OfflineTransport>();
    } else {
      transport_ = std::make_shared<providers::HttplibTransport>();
    }
  }
  return transport_;
}

std::shared_ptr<providers::ChatProvider> Registry::chat_provider(const std::string& name) {
  if (auto it = chat_.find(name); it != chat_.end()) return it->second;
  auto ps = settings_.providers.find(name);
  if (ps == settings_.providers.end()) throw ConfigError("unknown provider '" + name + "'");
  const auto& o = ps->second.options;
  std::shared_ptr<providers::ChatProvider> p;
  if (ps->second.kind == "mock") {
    if (!o.contains("script")) throw ConfigError("mock provider '" + name + "' needs a 'script'");
    p = std::make_shared<providers::MockChatProvider>(
        providers::load_mock_script(o["script"].get<std::string>()), name);
  } else if (ps->second.kind == "openai") {
    providers::OpenAIChatConfig c;
    c.name = name;
    c.base_url = get_or<std::string>(o, "base_url", c.base_url);
    c.api_key_env = get_or<std::string>(o, "api_key_env", c.api_key_env);
    c.max_tokens_field = get_or<std::string>(o, "max_tokens_field", c.max_tokens_field);
    if (o.contains("effort_values")) {
      for (const auto& [k, v] : o["effort_values"].items()) {
        c.effort_values[providers::parse_effort(k)] = v.get<std::string>();
      }
    }
    p = std::make_shared<providers::OpenAIChatProvider>(std::move(c), transport());
  } else {
    throw ConfigError("provider '" + name + "' (" + ps->second.kind + ") is not a chat provider");
  }
  chat_.emplace(name, p);
  return p;
}

std::shared_ptr<providers::EmbeddingProvider> Registry::embedding_provider(const std::string& name) {
  if (auto it = embed_.find(name); it != embed_.end()) return it->second;
  auto ps = settings_.providers.find(name);
  if (ps == settings_.providers.end()) throw ConfigError("unknown provider '" + name + "'");
  const auto& o = ps->second.options;
  std::shared_ptr<providers::EmbeddingProvider> p;
  if (ps->second.kind == "hashed") {
    p = std::make_shared<providers::HashedEmbeddingProvider>(get_or<int>(o, "dim", 384),
                                                             get_or<int>(o, "max_tokens", 512));
  } else if (ps->second.kind == "http-embedding") {
    providers::HttpEmbeddingConfig c;
    c.base_url = get_or<std::string>(o, "base_url", c.base_url);
    c.model = get_or<std::string>(o, "model", c.model);
    c.api_key_env = get_or<std::string>(o, "api_key_env", c.api_key_env);
    p = std::make_shared<providers::HttpEmbeddingProvider>(std::move(c), transport());
  } else {
    throw ConfigError("provider '" + name + "' (" + ps->second.kind + ") is not an embedding provider");
  }
  embed_.emplace(name, p);
  return p;
}

providers::ClientOptions Registry::client_options(const std::string& ns, const std::string& provider) {
  providers::ClientOptions o;
  o.cache_namespace = ns;
  o.retry = settings_.retry;
  o.cache = cache_;
  o.jitter_seed = options_.seed;
  const auto& ps = settings_.providers.at(provider);
  if (ps.rate_per_second > 0) {
    auto& limiter = limiters_[provider];
    if (!limiter) limiter = std::make_shared<providers::RateLimiter>(ps.rate_per_second, ps.burst);
    o.limiter = limiter;
  }
  return o;
}

std::shared_ptr<providers::ChatClient> Registry::chat_client(const ModelRef& model,
                                                             const std::string& role) {
  return std::make_shared<providers::ChatClient>(
      chat_provider(model.provider), client_options(role + ":" + model.spec.model_id, model.provider));
}

std::shared_ptr<providers::EmbeddingClient> Registry::embedding_client() {
  return std::make_shared<providers::EmbeddingClient>(
      embedding_provider(settings_.embedding_provider),
      client_options("embedding", settings_.embedding_provider), settings_.embedding_batch);
}

std::shared_ptr<judging::Judge> Registry::judge() {
  if (judge_) return judge_;
  if (!settings_.judge) throw ConfigError("no judge model configured (models.judge)");
  if (!settings_.criteria) throw ConfigError("no criteria model configured (models.criteria)");
  judging::JudgeConfig jc;
  jc.criteria_model = settings_.criteria->spec;
  jc.judge_model = settings_.judge->spec;
  if (settings_.criteria_demos) jc.criteria_demos = prompts::load_demos(*settings_.criteria_demos, "original", "criterion");
  using prompts::TemplateKind;
  auto pick = [&](TemplateKind kind) {
    auto it = settings_.templates.find(std::string(prompts::to_string(kind)));
    return it == settings_.templates.end() ? prompts::default_template(kind)
                                           : prompts::load_template(it->second, kind);
  };
  jc.templates = {pick(TemplateKind::criterion), pick(TemplateKind::judge_safety),
                  pick(TemplateKind::judge_practicality), pick(TemplateKind::judge_plain)};
  judge_ = std::make_shared<judging::Judge>(chat_client(*settings_.criteria, "criteria"),
                                            chat_client(*settings_.judge, "judge"), std::move(jc));
  return judge_;
}

laundering::Pipeline Registry::pipeline(const ModelRef& target) {
  if (!settings_.launderer) throw ConfigError("no launderer model configured (models.launderer)");
  laundering::Pipeline p;
  p.launderer = chat_client(*settings_.launderer, "launderer");
  p.target = chat_client(target, "target");
  p.judge = judge();
  using prompts::TemplateKind;
  if (auto it = settings_.templates.find("launder"); it != settings_.templates.end()) {
    p.templates.launder = prompts::load_template(it->second, TemplateKind::launder);
  }
  if (auto it = settings_.templates.find("regen"); it != settings_.templates.end()) {
    p.templates.regen = prompts::load_template(it->second, TemplateKind::regen);
  }
  return p;
}

laundering::CampaignConfig Registry::campaign_config(const ModelRef& target) const {
  if (!settings_.launderer) throw ConfigError("no launderer model configured (models.launderer)");
  laundering::CampaignConfig c;
  if (settings_.demos) c.demos = prompts::load_demos(*settings_.demos);
  c.demo_count = settings_.demo_count;
  c.max_iterations = settings_.max_iterations;
  c.target_asr = settings_.target_asr;
  c.launderer = settings_.launderer->spec;
  c.target = target.spec;
  c.seed = options_.seed;
  c.workers = settings_.workers;
  c.pe_base = settings_.pe_base;
  return c;
}

const ModelRef& Registry::target(const std::string& name) const {
  if (settings_.targets.empty()) throw ConfigError("no target models configured (models.targets)");
  if (name.empty()) return settings_.targets.front();
  for (const auto& t : settings_.targets) {
    if (t.name == name || t.spec.model_id == name) return t;
  }
  throw ConfigError("unknown target '" + name + "'");
}

}  // namespace cueaudit::config
