#include "asknav/external_policy.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <stdexcept>

#include "asknav/trajlog.hpp"

namespace asknav {

using nlohmann::json;

json decide_request(const DecisionContext& ctx, const std::string& instruction) {
  const Observation& obs = ctx.observation;
  const BeliefView& b = obs.belief;

  json visible = json::array();
  for (const auto& o : obs.visible_objects) {
    visible.push_back(json{{"id", o.id}, {"category", o.category}, {"attributes", o.attributes}});
  }
  json remaining = json::array();
  for (const auto& slot : b.slots) {
    json sj{{"id", slot.object_id},
            {"location_known", slot.location_known},
            {"co_located", slot.co_located}};
    if (slot.location_known) {
      sj["distance"] = slot.distance;
      sj["location_id"] = slot.believed_location_id;
    } else {
      sj["distance"] = nullptr;
      sj["location_id"] = nullptr;
    }
    remaining.push_back(sj);
  }
  json valid = json::array();
  for (int t = 0; t < kTemplateCount; ++t) {
    if (ctx.valid_mask[t]) valid.push_back(template_name(t));
  }
  json last_reply = nullptr;
  if (obs.last_reply.has_value()) {
    last_reply = json{{"useful", obs.last_reply->useful}, {"text", obs.last_reply->text}};
    if (obs.last_reply->disclosed.has_value()) {
      last_reply["disclosed"] = json{{"kind", obs.last_reply->disclosed->first},
                                     {"value", obs.last_reply->disclosed->second}};
    }
  }
  json last_memory = nullptr;
  if (obs.last_memory.has_value()) {
    last_memory = json::array();
    for (const auto& f : *obs.last_memory) {
      last_memory.push_back(json{{"object_id", f.object_id},
                                 {"category", f.category},
                                 {"attributes", f.attributes},
                                 {"recorded_location_id", f.recorded_location_id}});
    }
  }

  return json{{"type", "decide"},
              {"protocol_version", 1},
              {"instruction", instruction},
              {"category", b.category},
              {"location_id", obs.location_id},
              {"visible_objects", visible},
              {"remaining_candidates", remaining},
              {"explore_target", b.explore_target.empty() ? json(nullptr) : json(b.explore_target)},
              {"constraints", b.constraints},
              {"counters",
               json{{"n_asks", b.n_asks},
                    {"n_mems", b.n_mems},
                    {"steps_elapsed", b.steps_elapsed},
                    {"horizon", b.horizon}}},
              {"last_reply", last_reply},
              {"last_memory", last_memory},
              {"valid_actions", valid}};
}

SubprocessPolicy::SubprocessPolicy(std::vector<std::string> argv, std::string instruction,
                                   double timeout_s)
    : argv_(std::move(argv)), instruction_(std::move(instruction)), timeout_s_(timeout_s) {
  if (argv_.empty()) throw std::invalid_argument("external policy: empty command");
  spawn();
}

SubprocessPolicy::~SubprocessPolicy() { shutdown(); }

void SubprocessPolicy::spawn() {
  int to_pipe[2], from_pipe[2];
  if (pipe(to_pipe) != 0 || pipe(from_pipe) != 0) {
    throw std::runtime_error("external policy: pipe() failed");
  }
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("external policy: fork() failed");
  if (pid == 0) {
    dup2(to_pipe[0], STDIN_FILENO);
    dup2(from_pipe[1], STDOUT_FILENO);
    close(to_pipe[0]);
    close(to_pipe[1]);
    close(from_pipe[0]);
    close(from_pipe[1]);
    std::vector<char*> cargv;
    for (auto& a : argv_) cargv.push_back(a.data());
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }
  close(to_pipe[0]);
  close(from_pipe[1]);
  child_pid_ = pid;
  to_child_ = to_pipe[1];
  from_child_ = from_pipe[0];
}

void SubprocessPolicy::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (child_pid_ > 0) {
    kill(child_pid_, SIGTERM);
    int status = 0;
    waitpid(child_pid_, &status, 0);
    child_pid_ = -1;
  }
}

bool SubprocessPolicy::alive() const { return child_pid_ > 0; }

bool SubprocessPolicy::write_line(const std::string& line) {
  if (to_child_ < 0) return false;
  std::string payload = line + "\n";
  size_t off = 0;
  while (off < payload.size()) {
    const ssize_t n = write(to_child_, payload.data() + off, payload.size() - off);
    if (n <= 0) return false;
    off += static_cast<size_t>(n);
  }
  return true;
}

bool SubprocessPolicy::read_line(std::string& line, double timeout_s) {
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return true;
    }
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return false;
    const int remaining_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
    struct pollfd pfd = {from_child_, POLLIN, 0};
    const int rv = poll(&pfd, 1, std::max(1, remaining_ms));
    if (rv <= 0) return false;
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n <= 0) return false;  // closed channel
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

void SubprocessPolicy::begin_episode() {
  if (alive()) write_line(json{{"type", "episode_start"}, {"protocol_version", 1}}.dump());
}

ActionChoice SubprocessPolicy::decide(const DecisionContext& ctx, Rng&) {
  // any protocol failure maps to an unresolvable action; the engine charges
  // the format penalty and applies the retry-then-fail rule
  const ActionChoice malformed{make_found(""), 0.0, -1};
  if (!alive()) return malformed;
  if (!write_line(decide_request(ctx, instruction_).dump())) return malformed;
  std::string line;
  if (!read_line(line, timeout_s_)) return malformed;
  try {
    const json j = json::parse(line);
    Action action = action_from_json(j.at("action"));
    return ActionChoice{std::move(action), 0.0, -1};
  } catch (const std::exception&) {
    return malformed;
  }
}

}  // namespace asknav
