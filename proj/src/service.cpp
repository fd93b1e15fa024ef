#include "meqa/service.hpp"

#include <ctime>
#include <fstream>
#include <set>

#include "meqa/error.hpp"
#include "meqa/log.hpp"

namespace meqa::app {

using nlohmann::json;

Clock system_clock() {
  return [] { return std::chrono::system_clock::now(); };
}

namespace {

std::string iso8601(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json section_codes(const std::vector<Section>& v) {
  json out = json::array();
  for (auto s : v) out.push_back(section_code(s));
  return out;
}

HttpReply error_reply(int status, std::string_view code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

}  // namespace

json passage_to_json(const answer::Passage& p) {
  json highlights = json::array();
  for (const auto& h : p.highlights) {
    highlights.push_back({{"text", h.text}, {"kind", h.kind == answer::HighlightKind::Concept ? "concept" : "context"}});
  }
  return {{"section", section_code(p.section)},
          {"section_key", section_key(p.section)},
          {"section_heading", p.section_heading},
          {"context", p.context ? json(*p.context) : json(nullptr)},
          {"sentences", p.sentences},
          {"highlights", highlights},
          {"relevance", p.relevance},
          {"source", answer::passage_source_name(p.source)}};
}

json bundle_to_json(const answer::AnswerBundle& b) {
  json main = json::array(), additional = json::array();
  for (const auto& p : b.main) main.push_back(passage_to_json(p));
  for (const auto& p : b.additional) additional.push_back(passage_to_json(p));
  return {{"reference_number", b.reference_number},
          {"display_name", b.display_name},
          {"main", main},
          {"additional", additional}};
}

json refusal_to_json(const answer::Refusal& r) {
  return {{"reason", answer::refusal_reason_name(r.reason)}, {"message", r.message}};
}

json answer_to_json(const answer::AnswerResult& result) {
  json out;
  json probs = json::array();
  if (result.trace.prediction) {
    for (double p : result.trace.prediction->probabilities) probs.push_back(p);
  }
  if (result.answered()) {
    out["status"] = "answered";
    out["bundle"] = bundle_to_json(result.bundle());
  } else {
    out["status"] = "refused";
    out["refusal"] = refusal_to_json(result.refusal());
  }
  out["section_probabilities"] = probs;
  return out;
}

std::string_view category_name(FeedbackCategory c) {
  switch (c) {
    case FeedbackCategory::InformationPresentation: return "InformationPresentation";
    case FeedbackCategory::ChoiceOfMedicine: return "ChoiceOfMedicine";
    case FeedbackCategory::QuestionsWithoutMedicine: return "QuestionsWithoutMedicine";
    case FeedbackCategory::MeqaImprovements: return "MeqaImprovements";
    case FeedbackCategory::RightAnswer: return "RightAnswer";
  }
  return "RightAnswer";
}

std::optional<FeedbackCategory> category_from_name(std::string_view name) {
  for (auto c : {FeedbackCategory::InformationPresentation, FeedbackCategory::ChoiceOfMedicine,
                 FeedbackCategory::QuestionsWithoutMedicine, FeedbackCategory::MeqaImprovements,
                 FeedbackCategory::RightAnswer}) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

AnswerDigest digest_of(const answer::AnswerResult& result) {
  AnswerDigest d;
  if (result.answered()) {
    d.status = "answered";
    const auto& b = result.bundle();
    d.reference_number = b.reference_number;
    std::set<Section> s;
    for (const auto& p : b.main) s.insert(p.section);
    for (const auto& p : b.additional) s.insert(p.section);
    d.sections.assign(s.begin(), s.end());
  } else {
    d.status = "refused";
    d.refusal = std::string(answer::refusal_reason_name(result.refusal().reason));
    if (result.trace.selected_reference) d.reference_number = *result.trace.selected_reference;
  }
  return d;
}

json feedback_to_json(const FeedbackRecord& r) {
  json j = {{"id", r.id},
            {"timestamp", r.timestamp},
            {"question_id", r.question_id},
            {"question", r.question},
            {"answer",
             {{"status", r.answer.status},
              {"reference_number", r.answer.reference_number},
              {"sections", section_codes(r.answer.sections)},
              {"refusal", r.answer.refusal}}},
            {"stars", r.stars}};
  j["comment"] = r.comment ? json(*r.comment) : json(nullptr);
  j["category"] = r.category ? json(category_name(*r.category)) : json(nullptr);
  j["client_token"] = r.client_token ? json(*r.client_token) : json(nullptr);
  return j;
}

FeedbackRecord feedback_from_json(const json& j) {
  FeedbackRecord r;
  r.id = j.at("id").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.question_id = j.at("question_id").get<std::string>();
  r.question = j.value("question", std::string{});
  const auto& a = j.at("answer");
  r.answer.status = a.value("status", std::string{});
  r.answer.reference_number = a.value("reference_number", std::string{});
  for (int code : a.value("sections", std::vector<int>{})) r.answer.sections.push_back(section_from_code(code));
  r.answer.refusal = a.value("refusal", std::string{});
  r.stars = j.at("stars").get<int>();
  if (r.stars < 1 || r.stars > 5) throw ValidationError("stars out of range");
  if (j.contains("comment") && !j["comment"].is_null()) r.comment = j["comment"].get<std::string>();
  if (j.contains("category") && !j["category"].is_null()) {
    r.category = category_from_name(j["category"].get<std::string>());
    if (!r.category) throw ValidationError("unknown feedback category");
  }
  if (j.contains("client_token") && !j["client_token"].is_null()) r.client_token = j["client_token"].get<std::string>();
  return r;
}

// ---------------------------------------------------------------------------
// Feedback log

FeedbackLog::FeedbackLog(std::string path) : path_(std::move(path)) {
  if (std::ifstream(path_).good()) records_ = replay(path_);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.client_token) by_token_.emplace(std::make_pair(r.question_id, *r.client_token), i);
    // ids look like fb-000123
    if (r.id.rfind("fb-", 0) == 0) {
      try {
        next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(r.id.substr(3)) + 1);
      } catch (const std::exception&) {
      }
    }
  }
}

std::vector<FeedbackRecord> FeedbackLog::replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<FeedbackRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(feedback_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return out;
}

FeedbackLog::Submission FeedbackLog::submit(FeedbackRecord record) {
  std::lock_guard lock(mutex_);
  if (record.client_token) {
    auto it = by_token_.find({record.question_id, *record.client_token});
    if (it != by_token_.end()) return {records_[it->second], false};
  }
  char id[32];
  std::snprintf(id, sizeof(id), "fb-%06llu", static_cast<unsigned long long>(next_id_));
  record.id = id;

  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append to feedback log " + path_);
  out << feedback_to_json(record).dump() << '\n';
  out.flush();
  if (!out) throw Error("write to feedback log " + path_ + " failed");

  ++next_id_;
  if (record.client_token) by_token_.emplace(std::make_pair(record.question_id, *record.client_token), records_.size());
  records_.push_back(record);
  return {std::move(record), true};
}

std::vector<FeedbackRecord> FeedbackLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

// ---------------------------------------------------------------------------
// Question store

QuestionStore::QuestionStore(std::size_t capacity, std::chrono::seconds ttl, Clock clock)
    : capacity_(std::max<std::size_t>(1, capacity)), ttl_(ttl), clock_(std::move(clock)) {}

std::string QuestionStore::question_id(std::string_view question) {
  // FNV-1a, 64 bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : question) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "q-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void QuestionStore::evict_locked(std::chrono::system_clock::time_point now) const {
  while (!order_.empty()) {
    const auto& [id, issued] = order_.front();
    auto it = entries_.find(id);
    const bool stale = it == entries_.end() || it->second.issued != issued;
    if (stale) {
      order_.pop_front();
      continue;
    }
    if (entries_.size() > capacity_ || now - issued >= ttl_) {
      entries_.erase(it);
      order_.pop_front();
      continue;
    }
    break;
  }
}

std::string QuestionStore::remember(const std::string& question, const AnswerDigest& answer) {
  const auto now = clock_();
  const auto id = question_id(question);
  std::lock_guard lock(mutex_);
  entries_[id] = Entry{question, answer, now};
  order_.emplace_back(id, now);
  evict_locked(now);
  return id;
}

std::optional<QuestionStore::Entry> QuestionStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  evict_locked(clock_());
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t QuestionStore::size() const {
  std::lock_guard lock(mutex_);
  evict_locked(clock_());
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Handlers

Service::Service(std::shared_ptr<FeedbackLog> feedback, std::shared_ptr<QuestionStore> questions, Clock clock)
    : feedback_(std::move(feedback)), questions_(std::move(questions)), clock_(std::move(clock)) {}

void Service::set_system(std::shared_ptr<const answer::QaSystem> system) {
  std::unique_lock lock(system_mutex_);
  system_ = std::move(system);
}

std::shared_ptr<const answer::QaSystem> Service::system() const {
  std::shared_lock lock(system_mutex_);
  return system_;
}

bool Service::ready() const { return system() != nullptr; }

HttpReply Service::ask(std::string_view body) const {
  const auto sys = system();
  if (!sys) return error_reply(503, "NotReady", "service is starting");
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return error_reply(400, "BadRequest", "body must be a JSON object");
  }
  if (!req.is_object() || !req.contains("question") || !req["question"].is_string()) {
    return error_reply(400, "EmptyQuestion", "field 'question' is required");
  }
  const auto question = req["question"].get<std::string>();
  try {
    const auto result = sys->ask(question);
    auto out = answer_to_json(result);
    out["question_id"] = questions_->remember(question, digest_of(result));
    return {200, out};
  } catch (const EmptyQuestion& e) {
    return error_reply(400, "EmptyQuestion", e.what());
  }
}

HttpReply Service::feedback(std::string_view body) const {
  if (!system()) return error_reply(503, "NotReady", "service is starting");
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return error_reply(400, "BadRequest", "body must be a JSON object");
  }
  if (!req.is_object()) return error_reply(400, "BadRequest", "body must be a JSON object");
  if (!req.contains("question_id") || !req["question_id"].is_string()) {
    return error_reply(400, "BadRequest", "field 'question_id' is required");
  }
  if (!req.contains("stars") || !req["stars"].is_number_integer()) {
    return error_reply(400, "BadRequest", "field 'stars' must be an integer");
  }
  FeedbackRecord r;
  r.question_id = req["question_id"].get<std::string>();
  r.stars = req["stars"].get<int>();
  if (r.stars < 1 || r.stars > 5) return error_reply(400, "StarsOutOfRange", "stars must be between 1 and 5");
  if (req.contains("comment") && !req["comment"].is_null()) {
    if (!req["comment"].is_string()) return error_reply(400, "BadRequest", "comment must be a string");
    r.comment = req["comment"].get<std::string>();
  }
  if (req.contains("category") && !req["category"].is_null()) {
    if (!req["category"].is_string()) return error_reply(400, "BadRequest", "category must be a string");
    r.category = category_from_name(req["category"].get<std::string>());
    if (!r.category) return error_reply(400, "UnknownCategory", "unknown feedback category");
  }
  if (req.contains("client_token") && !req["client_token"].is_null()) {
    if (!req["client_token"].is_string()) return error_reply(400, "BadRequest", "client_token must be a string");
    r.client_token = req["client_token"].get<std::string>();
  }
  const auto entry = questions_->find(r.question_id);
  if (!entry) return error_reply(404, "UnknownQuestion", "unknown or expired question_id");
  r.question = entry->question;
  r.answer = entry->answer;
  r.timestamp = iso8601(clock_());
  const auto sub = feedback_->submit(std::move(r));
  return {200, {{"feedback_id", sub.record.id}, {"created", sub.created}}};
}

HttpReply Service::leaflet(const std::string& reference_number) const {
  const auto sys = system();
  if (!sys) return error_reply(503, "NotReady", "service is starting");
  const auto* l = sys->store().get_leaflet(reference_number);
  if (!l) return error_reply(404, "NotFound", "no leaflet " + reference_number);
  return {200, leaflet_to_json(*l)};
}

HttpReply Service::health() const {
  const auto sys = system();
  json body = {{"status", sys ? "ok" : "starting"}, {"ready", sys != nullptr}};
  if (sys) body["leaflets"] = sys->store().leaflets().size();
  return {200, body};
}

}  // namespace meqa::app
