#pragma once

// Loopback chat-completions server for exercising the interpret client.
// Each test installs a handler; requests and bodies are recorded.

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace stub {

struct Reply {
  int status = 200;
  std::string content;
  int delay_ms = 0;
};

class Server {
 public:
  using Handler = std::function<Reply(int call, const nlohmann::json& body)>;

  explicit Server(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      int call = 0;
      {
        std::lock_guard lock(mutex_);
        bodies_.push_back(body);
        call = static_cast<int>(bodies_.size());
      }
      const Reply reply = handler_(call, body);
      if (reply.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(reply.delay_ms));
      res.status = reply.status;
      if (reply.status == 200) {
        const nlohmann::json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", reply.content}}}}}}};
        res.set_content(out.dump(), "application/json");
      } else {
        res.set_content(R"({"error":"injected"})", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~Server() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  std::vector<nlohmann::json> bodies() const {
    std::lock_guard lock(mutex_);
    return bodies_;
  }

  std::size_t calls() const { return bodies().size(); }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<nlohmann::json> bodies_;
};

}  // namespace stub
