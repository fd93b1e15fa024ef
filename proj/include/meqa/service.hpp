#pragma once

// HTTP/JSON service: ask, feedback, leaflet lookup and health, written as
// plain request handlers so they can be exercised without a socket.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "meqa/answer.hpp"

namespace meqa::app {

using Clock = std::function<std::chrono::system_clock::time_point()>;

Clock system_clock();

// JSON wire format of answers.
nlohmann::json passage_to_json(const answer::Passage& p);
nlohmann::json bundle_to_json(const answer::AnswerBundle& b);
nlohmann::json refusal_to_json(const answer::Refusal& r);
/// {status: answered|refused, bundle?, refusal?, section_probabilities}
nlohmann::json answer_to_json(const answer::AnswerResult& result);

enum class FeedbackCategory { InformationPresentation, ChoiceOfMedicine, QuestionsWithoutMedicine, MeqaImprovements, RightAnswer };

std::string_view category_name(FeedbackCategory c);
/// nullopt for an unknown name.
std::optional<FeedbackCategory> category_from_name(std::string_view name);

struct AnswerDigest {
  std::string status;  // answered | refused
  std::string reference_number;
  std::vector<Section> sections;
  std::string refusal;

  bool operator==(const AnswerDigest&) const = default;
};

AnswerDigest digest_of(const answer::AnswerResult& result);

struct FeedbackRecord {
  std::string id;
  std::string timestamp;  // ISO 8601, UTC
  std::string question_id;
  std::string question;
  AnswerDigest answer;
  int stars = 0;
  std::optional<std::string> comment;
  std::optional<FeedbackCategory> category;
  std::optional<std::string> client_token;

  bool operator==(const FeedbackRecord&) const = default;
};

nlohmann::json feedback_to_json(const FeedbackRecord& r);
FeedbackRecord feedback_from_json(const nlohmann::json& j);

/// Append-only feedback log (one JSON record per line). A single mutex
/// serializes writers; the log is replayed on open.
class FeedbackLog {
 public:
  explicit FeedbackLog(std::string path);

  struct Submission {
    FeedbackRecord record;
    bool created = false;
  };

  /// Assigns id and stores the record, unless a record with the same
  /// (question_id, client_token) exists, which is returned instead.
  Submission submit(FeedbackRecord record);

  std::vector<FeedbackRecord> records() const;
  const std::string& path() const { return path_; }

  /// Records of a log file in file order. Throws ParseError.
  static std::vector<FeedbackRecord> replay(const std::string& path);

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::vector<FeedbackRecord> records_;
  std::map<std::pair<std::string, std::string>, std::size_t> by_token_;
  std::uint64_t next_id_ = 1;
};

/// Issued question ids with their answers, bounded in size and age.
class QuestionStore {
 public:
  struct Entry {
    std::string question;
    AnswerDigest answer;
    std::chrono::system_clock::time_point issued;
  };

  QuestionStore(std::size_t capacity, std::chrono::seconds ttl, Clock clock = system_clock());

  /// Deterministic id for the question text.
  static std::string question_id(std::string_view question);

  std::string remember(const std::string& question, const AnswerDigest& answer);
  std::optional<Entry> find(const std::string& id) const;
  std::size_t size() const;

 private:
  void evict_locked(std::chrono::system_clock::time_point now) const;

  std::size_t capacity_;
  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, Entry> entries_;
  mutable std::deque<std::pair<std::string, std::chrono::system_clock::time_point>> order_;
};

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

class Service {
 public:
  Service(std::shared_ptr<FeedbackLog> feedback, std::shared_ptr<QuestionStore> questions, Clock clock = system_clock());

  /// Until called, every endpoint but /health answers 503.
  void set_system(std::shared_ptr<const answer::QaSystem> system);
  bool ready() const;

  HttpReply ask(std::string_view body) const;
  HttpReply feedback(std::string_view body) const;
  HttpReply leaflet(const std::string& reference_number) const;
  HttpReply health() const;

 private:
  std::shared_ptr<const answer::QaSystem> system() const;

  std::shared_ptr<FeedbackLog> feedback_;
  std::shared_ptr<QuestionStore> questions_;
  Clock clock_;
  mutable std::shared_mutex system_mutex_;
  std::shared_ptr<const answer::QaSystem> system_;
};

/// Called once bound with the actual port and a function that stops the server.
using ListeningHook = std::function<void(int port, std::function<void()> stop)>;

/// Blocks serving the Service over HTTP until stopped. Port 0 binds any free
/// port. Returns false when the address cannot be bound.
bool serve_http(Service& service, const std::string& host, int port, const ListeningHook& on_listening = {});

}  // namespace meqa::app
