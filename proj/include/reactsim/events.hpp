#pragma once

#include <string>
#include <vector>

namespace reactsim {

enum class EventType {
  TargetNew,
  TargetAssigned,
  TargetDone,
  TargetDeferred,
  DpiStart,
  DpiSkip,
  RobotStuck,
  CallOros,
};

inline const char* event_name(EventType t) {
  switch (t) {
    case EventType::TargetNew: return "TARGET_NEW";
    case EventType::TargetAssigned: return "TARGET_ASSIGNED";
    case EventType::TargetDone: return "TARGET_DONE";
    case EventType::TargetDeferred: return "TARGET_DEFERRED";
    case EventType::DpiStart: return "DPI_START";
    case EventType::DpiSkip: return "DPI_SKIP";
    case EventType::RobotStuck: return "ROBOT_STUCK";
    case EventType::CallOros: return "CALL_OROS";
  }
  return "UNKNOWN";
}

struct Event {
  long tick = 0;
  EventType type = EventType::TargetNew;
  std::string payload;
};

inline std::string format_event(const Event& e) {
  std::string line = "tick=" + std::to_string(e.tick) + " event=" + event_name(e.type);
  if (!e.payload.empty()) {
    line += ' ';
    line += e.payload;
  }
  return line;
}

using EventLog = std::vector<Event>;

}  // namespace reactsim
