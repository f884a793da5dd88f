#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "swa/engine.h"
#include "swa/game.h"

namespace swa::bridge {

/// Line-delimited JSON spoken with an external candidate generator over its
/// stdin/stdout. One JSON object per line; unknown fields are ignored.
///
///   -> {"type":"hello","protocol_version":1,"n":5,"C":20,"beta":1.6,"x_max":8,"k":7}
///   <- {"type":"hello","protocol_version":1}
///   -> {"type":"propose_request","t":3,"agent_id":0,"mu":4.2,"last_X":21,"last_reward":3.1}
///   <- {"type":"propose_response","candidates":[0,3.5,8]}
///   -> {"type":"shutdown"}
///
/// last_X and last_reward are null on the first step. A response may echo
/// "t" and "agent_id"; echoed values that do not match the pending request
/// mark a late reply to an earlier request, which is skipped.
inline constexpr int kProtocolVersion = 1;

struct HelloParams {
  int n = 0;
  double capacity = 0.0;
  double beta = 0.0;
  double x_max = 0.0;
  int k = 0;
};

nlohmann::json hello_message(const HelloParams& p);
nlohmann::json propose_request_message(const engine::ProposeRequest& req);
nlohmann::json shutdown_message();

enum class ResponseStatus { kOk, kStale, kMalformed };

struct ParsedResponse {
  ResponseStatus status = ResponseStatus::kMalformed;
  std::vector<double> candidates;
};

ParsedResponse parse_propose_response(std::string_view line, int expected_t, int expected_agent);

// Throws BridgeError unless `line` is a hello with a matching protocol_version.
void check_hello_reply(std::string_view line);

struct Timeouts {
  std::chrono::milliseconds handshake{10000};
  std::chrono::milliseconds step{2000};
};

/// One external agent process. Construction starts the process and performs
/// the handshake; destruction sends shutdown and reaps the child.
class BridgeSession {
 public:
  // Throws BridgeError if the process cannot start or fails the handshake.
  BridgeSession(const std::string& command, const HelloParams& hello, Timeouts timeouts);
  ~BridgeSession();

  BridgeSession(const BridgeSession&) = delete;
  BridgeSession& operator=(const BridgeSession&) = delete;

  // std::nullopt on timeout, malformed reply or a dead process.
  std::optional<std::vector<double>> propose(const engine::ProposeRequest& req);

  int failures() const { return failures_; }

 private:
  struct Process;
  std::unique_ptr<Process> process_;
  Timeouts timeouts_;
  int failures_ = 0;
};

/// Routes each external agent's requests to its own session.
class AgentBridge : public engine::CandidateProposer {
 public:
  AgentBridge(const std::string& command, const HelloParams& hello, Timeouts timeouts,
              const std::vector<int>& agent_ids);

  std::optional<std::vector<double>> propose(const engine::ProposeRequest& req) override;

 private:
  std::map<int, std::unique_ptr<BridgeSession>> sessions_;
};

}  // namespace swa::bridge
