#pragma once

#include <string>
#include <vector>

#include "asknav/env.hpp"

#include "json.hpp"

namespace asknav {

// One decide request per decision, line-delimited JSON (protocol_version 1).
nlohmann::json decide_request(const DecisionContext& ctx, const std::string& instruction);

// Bridges the engine to an agent running as a child process speaking the
// line protocol on stdin/stdout. Anything that goes wrong on the channel
// (timeout, EOF, unparseable line) surfaces as a malformed action, so the
// engine's retry-then-fail rule applies.
class SubprocessPolicy : public Policy {
 public:
  SubprocessPolicy(std::vector<std::string> argv, std::string instruction,
                   double timeout_s = 10.0);
  ~SubprocessPolicy() override;

  SubprocessPolicy(const SubprocessPolicy&) = delete;
  SubprocessPolicy& operator=(const SubprocessPolicy&) = delete;

  ActionChoice decide(const DecisionContext& ctx, Rng& rng) override;
  void begin_episode() override;

  bool alive() const;

 private:
  void spawn();
  void shutdown();
  bool write_line(const std::string& line);
  bool read_line(std::string& line, double timeout_s);

  std::vector<std::string> argv_;
  std::string instruction_;
  double timeout_s_;
  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace asknav
