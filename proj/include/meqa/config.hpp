#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

namespace meqa::app {

struct AppConfig {
  std::string leaflets = "data/leaflets.jsonl";
  std::string lexicon = "data/lexicon.jsonl";
  std::string registry = "data/registry.jsonl";
  std::string words = "data/common_words.txt";  // empty: none
  std::string model = "model.ckpt";
  std::string feedback_log = "feedback.jsonl";
  std::string host = "127.0.0.1";
  int port = 8080;
  double threshold = 0.5;
  double extra_floor = 0.05;
  std::size_t k_extra = 2;
  std::size_t question_capacity = 10000;
  long question_ttl_seconds = 24 * 3600;
};

/// Unknown keys are rejected. Relative paths are resolved against `base_dir`
/// when it is nonempty.
AppConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = {});
nlohmann::json config_to_json(const AppConfig& c);
/// Throws ParseError.
AppConfig load_config(const std::string& path);

}  // namespace meqa::app
