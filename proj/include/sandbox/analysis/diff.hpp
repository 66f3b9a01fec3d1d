#pragma once

#include "sandbox/common/json.hpp"
#include "sandbox/device/ui.hpp"
#include "sandbox/sensor/channel.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sandbox::analysis {

inline constexpr int kDiffSchemaVersion = 1;

enum class ChangeKind { added, removed, modified };
enum class Verdict { no_change, adapted, inconclusive };

std::string_view to_string(ChangeKind k);
std::string_view to_string(Verdict v);

struct Change {
  std::string path;  // "/kind#n/kind#m", ordinals counted per kind among siblings
  ChangeKind kind = ChangeKind::modified;
  std::optional<std::string> before;  // element text; absent when added
  std::optional<std::string> after;   // absent when removed
  // Modified because the node changed place among the siblings both trees share.
  bool moved = false;

  friend bool operator==(const Change&, const Change&) = default;
};

struct DiffReport {
  std::string app_id;
  std::string before_ref;
  std::string after_ref;
  std::int64_t before_t = 0;
  std::int64_t after_t = 0;
  // Per sibling list: matched and removed nodes in before order, then added
  // nodes in after order; children follow their parent.
  std::vector<Change> changes;
  std::vector<sensor::Channel> attribution;  // channel declaration order
  Verdict verdict = Verdict::no_change;
  std::string narrative;

  friend bool operator==(const DiffReport&, const DiffReport&) = default;
};

// Channels with at least one frame in (before_t, after_t], in declaration order.
std::vector<sensor::Channel> attribute(const std::vector<sensor::SensorFrame>& frames, std::int64_t before_t,
                                       std::int64_t after_t);

// Element-level changes only: an added or removed subtree lists every node in it.
// A node present in both trees is modified when its text or attributes differ,
// or when its rank among the siblings present in both trees differs, so a
// reordering is a change while an insertion does not shift its neighbours.
std::vector<Change> diff_trees(const std::vector<device::UiElement>& before,
                               const std::vector<device::UiElement>& after);

// `frames` are the frames sent during the session; only those in the window count.
// Throws Error(app_mismatch) when the snapshots come from different apps.
DiffReport diff_snapshots(const device::UiSnapshot& before, const device::UiSnapshot& after,
                          const std::vector<sensor::SensorFrame>& frames);

Json to_json(const Change& c);
Json to_json(const DiffReport& r);
DiffReport diff_report_from_json(const Json& j);

}  // namespace sandbox::analysis
