#include "swa/bridge.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "swa/error.h"

namespace swa::bridge {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

json hello_message(const HelloParams& p) {
  return {{"type", "hello"}, {"protocol_version", kProtocolVersion}, {"n", p.n},
          {"C", p.capacity}, {"beta", p.beta}, {"x_max", p.x_max}, {"k", p.k}};
}

json propose_request_message(const engine::ProposeRequest& req) {
  json j = {{"type", "propose_request"}, {"t", req.t}, {"agent_id", req.agent_id}, {"mu", req.mu}};
  j["last_X"] = req.last_load ? json(*req.last_load) : json(nullptr);
  j["last_reward"] = req.last_reward ? json(*req.last_reward) : json(nullptr);
  return j;
}

json shutdown_message() { return {{"type", "shutdown"}}; }

ParsedResponse parse_propose_response(std::string_view line, int expected_t, int expected_agent) {
  ParsedResponse out;
  const json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object()) return out;
  if (auto it = j.find("type"); it == j.end() || *it != "propose_response") return out;

  auto echoed_mismatch = [&j](const char* key, int expected) {
    auto it = j.find(key);
    return it != j.end() && it->is_number_integer() && it->get<long long>() != expected;
  };
  if (echoed_mismatch("t", expected_t) || echoed_mismatch("agent_id", expected_agent)) {
    out.status = ResponseStatus::kStale;
    return out;
  }

  auto it = j.find("candidates");
  if (it == j.end() || !it->is_array()) return out;
  for (const auto& v : *it) {
    if (!v.is_number()) return out;
    const double d = v.get<double>();
    if (!std::isfinite(d)) return out;
    out.candidates.push_back(d);
  }
  out.status = ResponseStatus::kOk;
  return out;
}

void check_hello_reply(std::string_view line) {
  const json j = json::parse(line, nullptr, false);
  if (!j.is_object() || j.value("type", "") != "hello")
    throw BridgeError(fmt::format("agent handshake: expected a hello message, got '{}'", line));
  auto it = j.find("protocol_version");
  if (it == j.end() || !it->is_number_integer() || it->get<int>() != kProtocolVersion)
    throw BridgeError(
        fmt::format("agent handshake: protocol_version must be {}, got '{}'", kProtocolVersion, line));
}

struct BridgeSession::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;
  bool eof = false;

  explicit Process(const std::string& command) {
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0)
      throw BridgeError(fmt::format("pipe failed: {}", std::strerror(errno)));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      throw BridgeError(fmt::format("pipe failed: {}", std::strerror(errno)));
    }
    pid = ::fork();
    if (pid < 0) {
      for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
      throw BridgeError(fmt::format("fork failed: {}", std::strerror(errno)));
    }
    if (pid == 0) {
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child = in_pipe[1];
    from_child = out_pipe[0];
  }

  ~Process() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    if (pid > 0) {
      const auto deadline = Clock::now() + std::chrono::milliseconds(200);
      while (::waitpid(pid, nullptr, WNOHANG) == 0) {
        if (Clock::now() > deadline) {
          ::kill(pid, SIGKILL);
          ::waitpid(pid, nullptr, 0);
          break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
    }
  }

  bool write_line(const std::string& line) {
    if (to_child < 0) return false;
    std::string data = line + "\n";
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t w = ::write(to_child, data.data() + sent, data.size() - sent);
      if (w < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      sent += static_cast<std::size_t>(w);
    }
    return true;
  }

  // Next complete line before `deadline`; nullopt on timeout or EOF.
  std::optional<std::string> read_line(Clock::time_point deadline) {
    while (true) {
      if (auto nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (eof) return std::nullopt;
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (remaining <= 0) return std::nullopt;
      pollfd pfd{from_child, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
      if (ready < 0) {
        if (errno == EINTR) continue;
        return std::nullopt;
      }
      if (ready == 0) return std::nullopt;
      char chunk[4096];
      const ssize_t r = ::read(from_child, chunk, sizeof(chunk));
      if (r < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        eof = true;
      } else if (r == 0) {
        eof = true;
      } else {
        buffer.append(chunk, static_cast<std::size_t>(r));
      }
    }
  }
};

BridgeSession::BridgeSession(const std::string& command, const HelloParams& hello, Timeouts timeouts)
    : process_(std::make_unique<Process>(command)), timeouts_(timeouts) {
  if (!process_->write_line(hello_message(hello).dump()))
    throw BridgeError(fmt::format("agent '{}' closed its input before the handshake", command));
  const auto reply = process_->read_line(Clock::now() + timeouts_.handshake);
  if (!reply && process_->eof)
    throw BridgeError(fmt::format("agent '{}' exited before answering hello", command));
  if (!reply)
    throw BridgeError(fmt::format("agent '{}' did not answer hello within {} ms", command,
                                  timeouts_.handshake.count()));
  check_hello_reply(*reply);
}

BridgeSession::~BridgeSession() {
  if (process_) process_->write_line(shutdown_message().dump());
}

std::optional<std::vector<double>> BridgeSession::propose(const engine::ProposeRequest& req) {
  if (!process_->write_line(propose_request_message(req).dump())) {
    ++failures_;
    return std::nullopt;
  }
  const auto deadline = Clock::now() + timeouts_.step;
  while (auto line = process_->read_line(deadline)) {
    const auto parsed = parse_propose_response(*line, req.t, req.agent_id);
    if (parsed.status == ResponseStatus::kStale) continue;
    if (parsed.status == ResponseStatus::kMalformed) break;
    return parsed.candidates;
  }
  ++failures_;
  return std::nullopt;
}

AgentBridge::AgentBridge(const std::string& command, const HelloParams& hello, Timeouts timeouts,
                         const std::vector<int>& agent_ids) {
  for (int id : agent_ids) sessions_.emplace(id, std::make_unique<BridgeSession>(command, hello, timeouts));
}

std::optional<std::vector<double>> AgentBridge::propose(const engine::ProposeRequest& req) {
  auto it = sessions_.find(req.agent_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second->propose(req);
}

}  // namespace swa::bridge
