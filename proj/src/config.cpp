#include "meqa/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "meqa/error.hpp"

namespace meqa::app {

namespace {

std::string resolve(const std::string& p, const std::string& base) {
  if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

}  // namespace

AppConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  static const std::set<std::string> known = {"leaflets", "lexicon",     "registry",  "words",
                                              "model",    "feedback_log", "host",      "port",
                                              "threshold", "extra_floor", "k_extra",   "question_capacity",
                                              "question_ttl_seconds"};
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  AppConfig c;
  c.leaflets = resolve(j.value("leaflets", c.leaflets), base_dir);
  c.lexicon = resolve(j.value("lexicon", c.lexicon), base_dir);
  c.registry = resolve(j.value("registry", c.registry), base_dir);
  c.words = resolve(j.value("words", c.words), base_dir);
  c.model = resolve(j.value("model", c.model), base_dir);
  c.feedback_log = resolve(j.value("feedback_log", c.feedback_log), base_dir);
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  c.threshold = j.value("threshold", c.threshold);
  c.extra_floor = j.value("extra_floor", c.extra_floor);
  c.k_extra = j.value("k_extra", c.k_extra);
  c.question_capacity = j.value("question_capacity", c.question_capacity);
  c.question_ttl_seconds = j.value("question_ttl_seconds", c.question_ttl_seconds);
  if (c.threshold <= 0.0 || c.threshold >= 1.0) throw ValidationError("threshold must lie in (0, 1)");
  if (c.port < 0 || c.port > 65535) throw ValidationError("port out of range");
  return c;
}

nlohmann::json config_to_json(const AppConfig& c) {
  return {{"leaflets", c.leaflets},
          {"lexicon", c.lexicon},
          {"registry", c.registry},
          {"words", c.words},
          {"model", c.model},
          {"feedback_log", c.feedback_log},
          {"host", c.host},
          {"port", c.port},
          {"threshold", c.threshold},
          {"extra_floor", c.extra_floor},
          {"k_extra", c.k_extra},
          {"question_capacity", c.question_capacity},
          {"question_ttl_seconds", c.question_ttl_seconds}};
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  try {
    return config_from_json(j, std::filesystem::path(path).parent_path().string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
}

}  // namespace meqa::app
