#pragma once

// HTTP/JSON front of a LabelHub:
//   GET  /state          engine status
//   GET  /query          pending label query or null
//   POST /labels         {"id", "class"} -> {"accepted"}; 409 for a stale id
//   GET  /trace/rules    [[index, rule_count], ...]
//   GET  /trace/weights  [[index, lambda_1, ...], ...]
//   GET  /events         structural event list
//   GET  /stream         text/event-stream of {"type": query|state|event}

#include <memory>
#include <string>
#include <thread>

#include "rclass/harness/hub.hpp"

namespace httplib {
class Server;
}

namespace rclass::harness {

class Service {
 public:
  explicit Service(LabelHub& hub);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and starts serving on a background thread. Port 0 picks a free
  // port. Throws Error when the address cannot be bound.
  void start(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  LabelHub& hub_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

// "host:port" -> (host, port); a bare port means 127.0.0.1.
std::pair<std::string, int> parse_bind_address(const std::string& addr);

}  // namespace rclass::harness
