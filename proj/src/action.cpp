#include "asknav/action.hpp"

#include <stdexcept>

namespace asknav {

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Navigate: return "navigate";
    case ActionKind::Ask: return "ask";
    case ActionKind::GetMemory: return "get_memory";
    case ActionKind::Found: return "found";
  }
  return "found";
}

Action make_navigate(std::string location_id) {
  Action a;
  a.kind = ActionKind::Navigate;
  a.location_id = std::move(location_id);
  return a;
}

Action make_ask_open() {
  Action a;
  a.kind = ActionKind::Ask;
  a.ask_open = true;
  return a;
}

Action make_ask_kind(std::string kind) {
  Action a;
  a.kind = ActionKind::Ask;
  a.ask_open = false;
  a.ask_kind = std::move(kind);
  return a;
}

Action make_get_memory(std::string key) {
  Action a;
  a.kind = ActionKind::GetMemory;
  a.memory_key = std::move(key);
  return a;
}

Action make_found(std::string object_id) {
  Action a;
  a.kind = ActionKind::Found;
  a.object_id = std::move(object_id);
  return a;
}

std::string describe(const Action& a) {
  switch (a.kind) {
    case ActionKind::Navigate: return "navigate(" + a.location_id + ")";
    case ActionKind::Ask: return a.ask_open ? "ask(open)" : "ask(" + a.ask_kind + ")";
    case ActionKind::GetMemory: return "get_memory(" + a.memory_key + ")";
    case ActionKind::Found: return "found(" + a.object_id + ")";
  }
  return "?";
}

}  // namespace asknav
