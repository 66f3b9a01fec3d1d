#include "sandbox/device/ui.hpp"

#include "sandbox/common/error.hpp"

#include <algorithm>
#include <array>

namespace sandbox::device {
namespace {

constexpr std::array<std::string_view, 7> kKindNames{"banner", "card",      "notification", "badge",
                                                     "price",  "mode_flag", "message"};

[[noreturn]] void fail(const std::string& why) { throw Error(Errc::parse_error, "ui: " + why); }

}  // namespace

std::string_view to_string(ElementKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

std::optional<ElementKind> parse_element_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<ElementKind>(i);
  }
  return std::nullopt;
}

std::size_t tree_depth(const std::vector<UiElement>& roots) {
  std::size_t deepest = 0;
  for (const auto& e : roots) deepest = std::max(deepest, 1 + tree_depth(e.children));
  return deepest;
}

std::string path_segment(ElementKind kind, std::size_t ordinal) {
  return std::string(to_string(kind)) + "#" + std::to_string(ordinal);
}

Json to_json(const UiElement& e) {
  Json j;
  j["kind"] = to_string(e.kind);
  j["text"] = e.text;
  Json attrs = Json::object();
  for (const auto& [k, v] : e.attrs) attrs[k] = v;
  j["attrs"] = attrs;
  Json children = Json::array();
  for (const auto& c : e.children) children.push_back(to_json(c));
  j["children"] = children;
  return j;
}

Json to_json(const UiSnapshot& s) {
  Json j;
  j["app_id"] = s.app_id;
  j["t"] = s.t;
  Json roots = Json::array();
  for (const auto& e : s.ui_state) roots.push_back(to_json(e));
  j["ui_state"] = roots;
  j["raw_image_ref"] = s.raw_image_ref ? Json(*s.raw_image_ref) : Json(nullptr);
  return j;
}

UiElement element_from_json(const Json& j, std::size_t depth) {
  if (depth > kMaxTreeDepth) fail("tree deeper than 16 levels");
  if (!j.is_object()) fail("element must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "kind" && key != "text" && key != "attrs" && key != "children") fail("unknown element field '" + key + "'");
  }
  UiElement e;
  const auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) fail("element needs a kind");
  const auto parsed = parse_element_kind(kind->get<std::string>());
  if (!parsed) fail("unknown element kind '" + kind->get<std::string>() + "'");
  e.kind = *parsed;
  const auto text = j.find("text");
  if (text == j.end() || !text->is_string()) fail("element needs text");
  e.text = text->get<std::string>();
  const auto attrs = j.find("attrs");
  if (attrs == j.end() || !attrs->is_object()) fail("element needs an attrs object");
  for (const auto& [k, v] : attrs->items()) {
    if (!v.is_string()) fail("attribute values must be strings");
    e.attrs[k] = v.get<std::string>();
  }
  const auto children = j.find("children");
  if (children == j.end() || !children->is_array()) fail("element needs a children array");
  for (const auto& c : *children) e.children.push_back(element_from_json(c, depth + 1));
  return e;
}

UiSnapshot snapshot_from_json(const Json& j) {
  if (!j.is_object()) fail("snapshot must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "app_id" && key != "t" && key != "ui_state" && key != "raw_image_ref") {
      fail("unknown snapshot field '" + key + "'");
    }
  }
  UiSnapshot s;
  const auto app = j.find("app_id");
  if (app == j.end() || !app->is_string()) fail("snapshot needs app_id");
  s.app_id = app->get<std::string>();
  const auto t = j.find("t");
  if (t == j.end() || !t->is_number_integer() || t->get<std::int64_t>() < 0) fail("snapshot needs integer t >= 0");
  s.t = t->get<std::int64_t>();
  const auto roots = j.find("ui_state");
  if (roots == j.end() || !roots->is_array()) fail("snapshot needs a ui_state array");
  for (const auto& e : *roots) s.ui_state.push_back(element_from_json(e));
  const auto img = j.find("raw_image_ref");
  if (img != j.end() && !img->is_null()) {
    if (!img->is_string()) fail("raw_image_ref must be a string or null");
    s.raw_image_ref = img->get<std::string>();
  }
  return s;
}

}  // namespace sandbox::device
