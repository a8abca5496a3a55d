#include "rclass/harness/service.hpp"

#include <httplib.h>

#include <json.hpp>

#include "rclass/errors.hpp"
#include "rclass/harness/report.hpp"

namespace rclass::harness {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

std::pair<std::string, int> parse_bind_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  std::string host = colon == std::string::npos ? "127.0.0.1" : addr.substr(0, colon);
  const std::string port_s = colon == std::string::npos ? addr : addr.substr(colon + 1);
  if (host.empty()) host = "127.0.0.1";
  try {
    std::size_t used = 0;
    const int port = std::stoi(port_s, &used);
    if (used != port_s.size() || port < 0 || port > 65535) throw std::invalid_argument(port_s);
    return {host, port};
  } catch (const std::exception&) {
    throw ConfigError("bad bind address: " + addr);
  }
}

Service::Service(LabelHub& hub) : hub_(hub), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, to_json(hub_.status()));
  });

  srv.Get("/query", [this](const httplib::Request&, httplib::Response& res) {
    const auto q = hub_.pending();
    reply(res, q ? to_json(*q) : json(nullptr));
  });

  srv.Post("/labels", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error&) {
      reply(res, {{"accepted", false}, {"error", "body is not valid JSON"}}, 400);
      return;
    }
    if (!body.is_object() || !body.contains("id") || !body.contains("class") ||
        !body["id"].is_number_unsigned() || !body["class"].is_number_integer()) {
      reply(res, {{"accepted", false}, {"error", "expected {\"id\": uint, \"class\": int}"}}, 400);
      return;
    }
    switch (hub_.submit(body["id"].get<std::uint64_t>(), body["class"].get<int>())) {
      case SubmitResult::Accepted:
        reply(res, {{"accepted", true}});
        break;
      case SubmitResult::Stale:
        reply(res, {{"accepted", false}, {"error", "stale or unknown query id"}}, 409);
        break;
      case SubmitResult::BadClass:
        reply(res, {{"accepted", false}, {"error", "class out of range"}}, 400);
        break;
    }
  });

  srv.Get("/trace/rules", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& [i, n] : hub_.rule_trace()) out.push_back({i, n});
    reply(res, out);
  });

  srv.Get("/trace/weights", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& [i, w] : hub_.weight_trace()) {
      json row = json::array({i});
      for (double v : w) row.push_back(v);
      out.push_back(std::move(row));
    }
    reply(res, out);
  });

  srv.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& e : hub_.events()) out.push_back(to_json(e));
    reply(res, out);
  });

  srv.Get("/stream", [this](const httplib::Request&, httplib::Response& res) {
    auto cursor = std::make_shared<std::uint64_t>(0);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, cursor](std::size_t, httplib::DataSink& sink) {
          if (hub_.closed()) {
            sink.done();
            return true;
          }
          std::vector<std::string> msgs;
          *cursor = hub_.messages_after(*cursor, msgs, std::chrono::milliseconds(250));
          for (const auto& m : msgs) {
            const std::string frame = "data: " + m + "\n\n";
            if (!sink.write(frame.data(), frame.size())) return false;
          }
          if (msgs.empty()) {
            static const std::string ping = ": ping\n\n";
            if (!sink.write(ping.data(), ping.size())) return false;
          }
          return true;
        });
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                               std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    reply(res, {{"error", what}}, 500);
  });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) res.set_content(json{{"error", "not found"}}.dump(), "application/json");
  });
}

Service::~Service() { stop(); }

void Service::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Service::stop() {
  if (thread_.joinable()) {
    hub_.close();
    server_->stop();
    thread_.join();
  }
}

}  // namespace rclass::harness
