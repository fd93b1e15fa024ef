#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include "meqa/config.hpp"
#include "meqa/error.hpp"
#include "meqa/service.hpp"
#include "system_fixture.hpp"

#include <httplib.h>

using namespace meqa;
using namespace meqa::app;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("meqa_" + name);
  std::filesystem::remove(p);
  return p.string();
}

std::shared_ptr<const answer::QaSystem> stub_system() {
  static const auto system = std::make_shared<const answer::QaSystem>(
      testing::bundled_store(), testing::bundled_vocabulary(), [](const text::NormalizedQuestion&) {
        clf::SectionPrediction p;
        p.probabilities[section_index(Section::BeforeYouTake)] = 0.9;
        p.predicted = {Section::BeforeYouTake};
        return p;
      });
  return system;
}

struct FakeClock {
  std::chrono::system_clock::time_point now = std::chrono::system_clock::time_point{} + std::chrono::hours(24 * 365 * 50);
  Clock clock() {
    return [this] { return now; };
  }
};

const char* kCidine = "tengo reflujo por perforación gastrointestinal, ¿puedo tomar cidine?";

}  // namespace

TEST_CASE("service is not ready without a system") {
  Service svc(std::make_shared<FeedbackLog>(temp_path("fb0.jsonl")),
              std::make_shared<QuestionStore>(10, std::chrono::seconds(60)));
  CHECK_FALSE(svc.ready());
  CHECK(svc.ask(R"({"question":"hola"})").status == 503);
  CHECK(svc.feedback("{}").status == 503);
  CHECK(svc.leaflet("60001").status == 503);
  const auto h = svc.health();
  CHECK(h.status == 200);
  CHECK(h.body["status"] == "starting");
  CHECK(h.body["ready"] == false);
}

TEST_CASE("ask, leaflet and health handlers") {
  Service svc(std::make_shared<FeedbackLog>(temp_path("fb1.jsonl")),
              std::make_shared<QuestionStore>(10, std::chrono::seconds(60)));
  svc.set_system(stub_system());
  CHECK(svc.ready());

  auto r = svc.ask(json{{"question", kCidine}}.dump());
  REQUIRE(r.status == 200);
  CHECK(r.body["status"] == "answered");
  CHECK(r.body["bundle"]["reference_number"] == "60001");
  CHECK(r.body["bundle"]["main"][0]["section"] == 2);
  CHECK(r.body["bundle"]["main"][0]["section_key"] == "s2");
  CHECK(r.body["question_id"] == QuestionStore::question_id(kCidine));
  CHECK(r.body["section_probabilities"].size() == kSectionCount);

  r = svc.ask(json{{"question", "¿Qué puedo tomar para el dolor de cabeza?"}}.dump());
  REQUIRE(r.status == 200);
  CHECK(r.body["status"] == "refused");
  CHECK(r.body["refusal"]["reason"] == "NoMedicine");

  CHECK(svc.ask("not json").status == 400);
  CHECK(svc.ask("not json").body["error"] == "BadRequest");
  CHECK(svc.ask("{}").body["error"] == "EmptyQuestion");
  CHECK(svc.ask(R"({"question": 3})").status == 400);
  CHECK(svc.ask(R"({"question": " ¿? "})").body["error"] == "EmptyQuestion");

  r = svc.leaflet("58289");
  CHECK(r.status == 200);
  CHECK(leaflet_from_json(r.body) == *testing::bundled_store()->get_leaflet("58289"));
  CHECK(svc.leaflet("00000").status == 404);

  CHECK(svc.health().body["status"] == "ok");
  CHECK(svc.health().body["leaflets"] == 12);
}

TEST_CASE("feedback handler") {
  const auto log_path = temp_path("fb2.jsonl");
  FakeClock fc;
  auto log = std::make_shared<FeedbackLog>(log_path);
  Service svc(log, std::make_shared<QuestionStore>(10, std::chrono::seconds(60), fc.clock()), fc.clock());
  svc.set_system(stub_system());
  const std::string qid = svc.ask(json{{"question", kCidine}}.dump()).body["question_id"];

  auto fb = [&](json body) { return svc.feedback(body.dump()); };
  auto r = fb({{"question_id", qid}, {"stars", 5}, {"category", "RightAnswer"}, {"client_token", "t1"}});
  REQUIRE(r.status == 200);
  CHECK(r.body["created"] == true);
  const std::string id = r.body["feedback_id"];

  // Same token: the first record comes back.
  r = fb({{"question_id", qid}, {"stars", 1}, {"client_token", "t1"}});
  CHECK(r.status == 200);
  CHECK(r.body["created"] == false);
  CHECK(r.body["feedback_id"] == id);
  CHECK(log->records().size() == 1);

  // No token: always a new record.
  CHECK(fb({{"question_id", qid}, {"stars", 3}}).body["created"] == true);
  CHECK(fb({{"question_id", qid}, {"stars", 3}}).body["created"] == true);
  CHECK(log->records().size() == 3);

  CHECK(fb({{"question_id", qid}, {"stars", 0}}).body["error"] == "StarsOutOfRange");
  CHECK(fb({{"question_id", qid}, {"stars", 6}}).status == 400);
  CHECK(fb({{"question_id", qid}, {"stars", "5"}}).status == 400);
  CHECK(fb({{"stars", 5}}).status == 400);
  CHECK(fb({{"question_id", qid}, {"stars", 4}, {"category", "Other"}}).body["error"] == "UnknownCategory");
  CHECK(fb({{"question_id", "q-unknown"}, {"stars", 4}}).status == 404);
  CHECK(svc.feedback("[1,2").status == 400);

  const auto records = log->records();
  const auto& first = records.front();
  CHECK(first.question == kCidine);
  CHECK(first.answer.status == "answered");
  CHECK(first.answer.reference_number == "60001");
  CHECK(first.category == FeedbackCategory::RightAnswer);
  CHECK(first.timestamp.size() == 20);
  CHECK(first.timestamp.back() == 'Z');

  // Replay rebuilds the log, including idempotence.
  FeedbackLog reopened(log_path);
  CHECK(reopened.records() == log->records());
  FeedbackRecord again = first;
  again.stars = 2;
  const auto sub = reopened.submit(again);
  CHECK_FALSE(sub.created);
  CHECK(sub.record.id == id);
  FeedbackRecord fresh = first;
  fresh.client_token = "t2";
  const auto sub2 = reopened.submit(fresh);
  CHECK(sub2.created);
  CHECK(sub2.record.id != id);
  CHECK(FeedbackLog::replay(log_path).size() == 4);
  std::filesystem::remove(log_path);
}

TEST_CASE("feedback JSON round trip and categories") {
  FeedbackRecord r;
  r.id = "fb-000001";
  r.timestamp = "2024-01-01T00:00:00Z";
  r.question_id = "q-1";
  r.question = "¿?";
  r.answer = {"answered", "60001", {Section::BeforeYouTake}, ""};
  r.stars = 4;
  r.comment = "útil";
  r.category = FeedbackCategory::MeqaImprovements;
  CHECK(feedback_from_json(feedback_to_json(r)) == r);
  for (auto c : {FeedbackCategory::InformationPresentation, FeedbackCategory::ChoiceOfMedicine,
                 FeedbackCategory::QuestionsWithoutMedicine, FeedbackCategory::MeqaImprovements,
                 FeedbackCategory::RightAnswer}) {
    CHECK(category_from_name(category_name(c)) == c);
  }
  CHECK_FALSE(category_from_name("rightanswer").has_value());

  const auto bad = temp_path("fb_bad.jsonl");
  {
    std::ofstream out(bad);
    out << feedback_to_json(r).dump() << "\nnot json\n";
  }
  CHECK_THROWS_AS(FeedbackLog::replay(bad), ParseError);
  std::filesystem::remove(bad);
}

TEST_CASE("question store bounds size and age") {
  FakeClock fc;
  QuestionStore store(3, std::chrono::seconds(60), fc.clock());
  const AnswerDigest d{"refused", "", {}, "NoMedicine"};
  const auto a = store.remember("a", d);
  CHECK(a == QuestionStore::question_id("a"));
  CHECK(QuestionStore::question_id("a") != QuestionStore::question_id("b"));
  store.remember("b", d);
  store.remember("c", d);
  CHECK(store.size() == 3);
  store.remember("d", d);
  CHECK(store.size() == 3);
  CHECK_FALSE(store.find(a).has_value());
  CHECK(store.find(QuestionStore::question_id("d"))->question == "d");

  fc.now += std::chrono::seconds(59);
  CHECK(store.find(QuestionStore::question_id("b")).has_value());
  fc.now += std::chrono::seconds(2);
  CHECK_FALSE(store.find(QuestionStore::question_id("b")).has_value());
  CHECK(store.size() == 0);

  // Asking again refreshes the entry.
  store.remember("e", d);
  fc.now += std::chrono::seconds(40);
  store.remember("e", d);
  fc.now += std::chrono::seconds(40);
  CHECK(store.find(QuestionStore::question_id("e")).has_value());
  CHECK(store.size() == 1);
}

TEST_CASE("config") {
  const auto c = config_from_json({{"leaflets", "leaflets.jsonl"}, {"model", "/abs/model.ckpt"}, {"port", 9000}},
                                  "/base/dir");
  CHECK(c.leaflets == "/base/dir/leaflets.jsonl");
  CHECK(c.model == "/abs/model.ckpt");
  CHECK(c.port == 9000);
  CHECK(c.threshold == 0.5);
  CHECK_THROWS_AS(config_from_json({{"modle", "x"}}), ValidationError);
  CHECK_THROWS_AS(config_from_json({{"threshold", 1.5}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json::array()), ValidationError);
  CHECK(config_from_json(config_to_json(c)).leaflets == c.leaflets);

  const auto bundled = load_config(testing::data_path("config.json"));
  CHECK(std::filesystem::exists(bundled.leaflets));
  CHECK(std::filesystem::exists(bundled.lexicon));
  CHECK_THROWS_AS(load_config(testing::data_path("nope.json")), ParseError);
}

TEST_CASE("HTTP round trip") {
  const auto log_path = temp_path("fb_http.jsonl");
  Service svc(std::make_shared<FeedbackLog>(log_path), std::make_shared<QuestionStore>(10, std::chrono::seconds(60)));
  svc.set_system(stub_system());

  std::promise<std::pair<int, std::function<void()>>> ready;
  auto listening = ready.get_future();
  std::thread server([&] {
    serve_http(svc, "127.0.0.1", 0, [&](int port, std::function<void()> stop) { ready.set_value({port, stop}); });
  });
  const auto [port, stop] = listening.get();
  REQUIRE(port > 0);

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["status"] == "ok");

  res = client.Post("/ask", json{{"question", kCidine}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto body = json::parse(res->body);
  CHECK(body["bundle"]["reference_number"] == "60001");

  res = client.Post("/feedback", json{{"question_id", body["question_id"]}, {"stars", 4}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["created"] == true);

  res = client.Get("/leaflets/60001");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["reference_number"] == "60001");
  res = client.Get("/leaflets/00000");
  REQUIRE(res);
  CHECK(res->status == 404);

  res = client.Post("/ask", "{", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  stop();
  server.join();
  std::filesystem::remove(log_path);
}
