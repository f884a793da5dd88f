// Scripted external agent for bridge tests.
//
//   stub_agent echo       answers {0,4,8} every step
//   stub_agent garbage N  like echo, but sends junk at step N
//   stub_agent stale      sends a reply for the previous step before each answer
//   stub_agent sleep MS   handshakes, then sleeps MS before every answer
//   stub_agent bad_hello  replies with the wrong protocol version
//   stub_agent silent     never replies
//   stub_agent exit       exits immediately

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

using nlohmann::json;

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "echo";
  const int arg = argc > 2 ? std::atoi(argv[2]) : 0;
  if (mode == "exit") return 0;

  std::string line;
  while (std::getline(std::cin, line)) {
    const json msg = json::parse(line, nullptr, false);
    const std::string type = msg.is_object() ? msg.value("type", "") : "";
    if (mode == "silent") continue;
    if (type == "hello") {
      std::cout << json{{"type", "hello"}, {"protocol_version", mode == "bad_hello" ? 99 : 1}}.dump()
                << std::endl;
    } else if (type == "propose_request") {
      const int t = msg.at("t").get<int>();
      const int agent = msg.at("agent_id").get<int>();
      if (mode == "sleep") std::this_thread::sleep_for(std::chrono::milliseconds(arg));
      if (mode == "garbage" && t == arg) {
        std::cout << "{not json" << std::endl;
        continue;
      }
      if (mode == "stale")
        std::cout << json{{"type", "propose_response"}, {"t", t - 1}, {"agent_id", agent},
                          {"candidates", {8}}}.dump()
                  << std::endl;
      std::cout << json{{"type", "propose_response"}, {"t", t}, {"agent_id", agent},
                        {"candidates", {0, 4, 8}}}.dump()
                << std::endl;
    } else if (type == "shutdown") {
      return 0;
    }
  }
  return 0;
}
