#include <doctest.h>

#include <atomic>
#include <chrono>
#include <json.hpp>
#include <thread>

#include "rclass/harness/oracle.hpp"
#include "rclass/harness/prequential.hpp"
#include "rclass/harness/report.hpp"
#include "rclass/harness/service.hpp"
#include "rclass/harness/synthetic.hpp"

// after Eigen: <resolv.h> defines a `_res` macro that collides with Eigen
// parameter names
#include <httplib.h>

using namespace rclass;
using namespace rclass::harness;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

struct Served {
  LabelHub hub;
  Service service;
  httplib::Client client;

  explicit Served(int n_classes)
      : hub(n_classes), service(hub), client(start(service)) {
    client.set_read_timeout(5, 0);
  }
  ~Served() {
    hub.close();
    service.stop();
  }

  static std::string start(Service& s) {
    s.start("127.0.0.1", 0);
    return "http://127.0.0.1:" + std::to_string(s.port());
  }

  json get(const std::string& path) {
    const auto res = client.Get(path);
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return json::parse(res->body);
  }

  httplib::Result post_label(std::uint64_t id, int cls) {
    return client.Post("/labels", json{{"id", id}, {"class", cls}}.dump(), "application/json");
  }
};

}  // namespace

TEST_CASE("a fresh service reports an empty engine") {
  Served s(2);
  const json state = s.get("/state");
  CHECK(state["rules"] == 0);
  CHECK(state["samples_seen"] == 0);
  CHECK(state["labeled"] == 0);
  CHECK(state.contains("budget_spent"));
  CHECK(state.contains("theta"));
  CHECK(s.get("/query").is_null());
  CHECK(s.get("/events").is_array());
  CHECK(s.get("/trace/rules").empty());
  CHECK(s.get("/trace/weights").empty());
}

TEST_CASE("malformed and stale submissions are refused") {
  Served s(2);
  auto stale = s.post_label(42, 0);
  REQUIRE(stale);
  CHECK(stale->status == 409);
  CHECK(json::parse(stale->body)["accepted"] == false);

  auto garbage = s.client.Post("/labels", "{not json", "application/json");
  REQUIRE(garbage);
  CHECK(garbage->status == 400);

  auto missing = s.client.Post("/labels", R"({"id": 1})", "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 400);

  auto unknown = s.client.Get("/nowhere");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);
}

TEST_CASE("an operator labels a live stream over HTTP") {
  Served s(2);
  GaussianSpec spec;
  spec.n_classes = 2;
  spec.n_features = 2;
  const auto stream = gaussian_stream(80, spec, 5);

  HyperParams cfg;
  cfg.budget = 0.5;
  Classifier clf(cfg, 2, 2);
  InteractiveOracle oracle(s.hub, 5000ms);
  HubObserver observer(s.hub);
  RunOptions opt;
  opt.n_train = stream.size();

  RunReport report;
  std::atomic<bool> done{false};
  std::thread engine([&] {
    report = run_prequential(clf, stream, oracle, opt, &observer);
    done = true;
  });

  int answered = 0;
  bool checked_rejections = false;
  const auto give_up = std::chrono::steady_clock::now() + 60s;
  while (!done && std::chrono::steady_clock::now() < give_up) {
    const json q = s.get("/query");
    if (q.is_null()) {
      std::this_thread::sleep_for(2ms);
      continue;
    }
    const auto id = q["id"].get<std::uint64_t>();
    const auto index = q["index"].get<std::size_t>();
    CHECK(q["features"].size() == 2);
    CHECK(q["input_posterior"].size() == 2);
    CHECK(q["deadline_ms"].get<std::int64_t>() > 0);

    if (!checked_rejections) {
      auto out_of_range = s.post_label(id, 7);
      REQUIRE(out_of_range);
      CHECK(out_of_range->status == 400);
      auto wrong_id = s.post_label(id + 1000, 0);
      REQUIRE(wrong_id);
      CHECK(wrong_id->status == 409);
    }

    const json before = s.get("/state");
    auto ok = s.post_label(id, *stream[index].label);
    REQUIRE(ok);
    REQUIRE(ok->status == 200);
    CHECK(json::parse(ok->body)["accepted"] == true);
    ++answered;

    if (!checked_rejections) {
      // the same id cannot be answered twice
      auto again = s.post_label(id, *stream[index].label);
      REQUIRE(again);
      CHECK(again->status == 409);
      // the label feeds the next update: the labeled count moves past its old value
      const auto give = std::chrono::steady_clock::now() + 5s;
      while (s.get("/state")["labeled"] <= before["labeled"] &&
             std::chrono::steady_clock::now() < give) {
        std::this_thread::sleep_for(1ms);
      }
      CHECK(s.get("/state")["labeled"] > before["labeled"]);
      checked_rejections = true;
    }
  }
  engine.join();

  REQUIRE(done);
  CHECK(answered > 0);
  CHECK(report.labeled_count == static_cast<std::uint64_t>(answered));
  CHECK(report.oracle_timeouts == 0);
  const json state = s.get("/state");
  CHECK(state["labeled"] == answered);
  CHECK(state["samples_seen"] == stream.size());
  CHECK(state["rules"].get<std::size_t>() == clf.state().rules.size());
  const json rules = s.get("/trace/rules");
  CHECK(rules.size() == stream.size());
  CHECK(rules.back()[0] == stream.size());
  CHECK_FALSE(s.get("/events").empty());
}

TEST_CASE("an unanswered query times out and the sample is skipped") {
  Served s(2);
  InteractiveOracle oracle(s.hub, 50ms);
  StreamSample sample{Vector::Constant(2, 0.5), 1, 0};
  Verdict v;
  v.input_posterior = Vector::Constant(2, 0.5);
  CHECK_FALSE(oracle.request(sample, v).has_value());
  CHECK(s.get("/query").is_null());
}

TEST_CASE("the event stream pushes typed messages") {
  Served s(2);
  s.hub.publish_status(EngineStatus{3, 10, 4, 0.4, 0.7, 0});
  s.hub.publish_event(StructuralEvent{EventType::Grow, 9, 3, 0});

  std::string received;
  std::vector<json> messages;
  const auto res = s.client.Get("/stream", [&](const char* data, std::size_t len) {
    received.append(data, len);
    std::size_t pos;
    while ((pos = received.find("\n\n")) != std::string::npos) {
      const std::string frame = received.substr(0, pos);
      received.erase(0, pos + 2);
      if (frame.rfind("data: ", 0) == 0) messages.push_back(json::parse(frame.substr(6)));
    }
    return messages.size() < 2;  // stop once both arrived
  });
  REQUIRE(messages.size() >= 2);
  CHECK(messages[0]["type"] == "state");
  CHECK(messages[0]["data"]["rules"] == 3);
  CHECK(messages[1]["type"] == "event");
  CHECK(messages[1]["data"]["type"] == "grow");
}
