#pragma once

#include "sandbox/common/json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sandbox::device {

enum class ElementKind { banner, card, notification, badge, price, mode_flag, message };

inline constexpr std::size_t kMaxTreeDepth = 16;

std::string_view to_string(ElementKind k);
std::optional<ElementKind> parse_element_kind(std::string_view s);

struct UiElement {
  ElementKind kind = ElementKind::card;
  std::string text;
  std::map<std::string, std::string> attrs;
  std::vector<UiElement> children;

  friend bool operator==(const UiElement&, const UiElement&) = default;
};

struct UiSnapshot {
  std::string app_id;
  std::int64_t t = 0;
  std::vector<UiElement> ui_state;  // top-level elements in screen order
  std::optional<std::string> raw_image_ref;

  friend bool operator==(const UiSnapshot&, const UiSnapshot&) = default;
};

// Depth of the deepest element; an empty tree has depth 0.
std::size_t tree_depth(const std::vector<UiElement>& roots);

// "kind#n" where n counts earlier siblings of the same kind.
std::string path_segment(ElementKind kind, std::size_t ordinal);

Json to_json(const UiElement& e);
Json to_json(const UiSnapshot& s);
// Throws Error(parse_error) on unknown kinds, wrong types or depth > 16.
UiElement element_from_json(const Json& j, std::size_t depth = 1);
UiSnapshot snapshot_from_json(const Json& j);

}  // namespace sandbox::device
