#pragma once

#include <string>

namespace asknav {

enum class ActionKind { Navigate, Ask, GetMemory, Found };

std::string to_string(ActionKind k);

// One of the four action variants. Only the fields of the active variant are
// meaningful; helpers below construct them.
struct Action {
  ActionKind kind = ActionKind::Found;
  std::string location_id;  // Navigate
  bool ask_open = false;    // Ask
  std::string ask_kind;     // Ask (attribute kind when not open)
  std::string memory_key;   // GetMemory
  std::string object_id;    // Found

  bool operator==(const Action&) const = default;
};

Action make_navigate(std::string location_id);
Action make_ask_open();
Action make_ask_kind(std::string kind);
Action make_get_memory(std::string key);
Action make_found(std::string object_id);

std::string describe(const Action& a);

}  // namespace asknav
