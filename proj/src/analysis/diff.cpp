#include "sandbox/analysis/diff.hpp"

#include "sandbox/analysis/summary.hpp"
#include "sandbox/common/error.hpp"

#include <map>
#include <set>

namespace sandbox::analysis {
namespace {

using device::UiElement;

struct Keyed {
  std::string path;
  const UiElement* node;
};

std::vector<Keyed> key_siblings(const std::vector<UiElement>& siblings, const std::string& prefix) {
  std::map<device::ElementKind, std::size_t> ordinals;
  std::vector<Keyed> out;
  out.reserve(siblings.size());
  for (const auto& e : siblings) {
    out.push_back({prefix + "/" + device::path_segment(e.kind, ordinals[e.kind]++), &e});
  }
  return out;
}

void whole_subtree(const UiElement& e, const std::string& path, ChangeKind kind, std::vector<Change>& out) {
  Change c{path, kind, std::nullopt, std::nullopt, false};
  (kind == ChangeKind::added ? c.after : c.before) = e.text;
  out.push_back(std::move(c));
  for (const auto& child : key_siblings(e.children, path)) whole_subtree(*child.node, child.path, kind, out);
}

void diff_level(const std::vector<UiElement>& before, const std::vector<UiElement>& after, const std::string& prefix,
                std::vector<Change>& out) {
  const auto a = key_siblings(before, prefix);
  const auto b = key_siblings(after, prefix);
  std::map<std::string, const UiElement*> b_index;
  for (const auto& k : b) b_index.emplace(k.path, k.node);

  std::set<std::string> a_paths;
  for (const auto& k : a) a_paths.insert(k.path);
  std::map<std::string, std::size_t> b_rank;
  for (const auto& k : b) {
    if (a_paths.count(k.path)) b_rank.emplace(k.path, b_rank.size());
  }

  std::size_t a_rank = 0;
  for (const auto& k : a) {
    const auto it = b_index.find(k.path);
    if (it == b_index.end()) {
      whole_subtree(*k.node, k.path, ChangeKind::removed, out);
      continue;
    }
    const UiElement& x = *k.node;
    const UiElement& y = *it->second;
    const bool moved = b_rank.at(k.path) != a_rank++;
    if (moved || x.text != y.text || x.attrs != y.attrs) {
      out.push_back({k.path, ChangeKind::modified, x.text, y.text, moved});
    }
    diff_level(x.children, y.children, k.path, out);
  }
  for (const auto& k : b) {
    if (!a_paths.count(k.path)) whole_subtree(*k.node, k.path, ChangeKind::added, out);
  }
}

std::string narrate(const DiffReport& r) {
  if (r.changes.empty()) return "no visible change in " + r.app_id;
  std::string s;
  for (const auto& c : r.changes) {
    if (!s.empty()) s += "; ";
    s += c.path + " " + std::string(to_string(c.kind));
    if (c.kind == ChangeKind::modified) {
      s += " \"" + *c.before + "\" -> \"" + *c.after + "\"";
      if (c.moved) s += " (moved)";
    } else {
      s += " \"" + (c.kind == ChangeKind::added ? *c.after : *c.before) + "\"";
    }
  }
  if (r.attribution.empty()) {
    s += "; no spoofed channel in the window";
  } else {
    s += "; after spoofed ";
    for (std::size_t i = 0; i < r.attribution.size(); ++i) {
      if (i > 0) s += ", ";
      s += sensor::to_string(r.attribution[i]);
    }
  }
  return s;
}

std::optional<std::string> optional_text(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::added: return "added";
    case ChangeKind::removed: return "removed";
    case ChangeKind::modified: return "modified";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::no_change: return "no_change";
    case Verdict::adapted: return "adapted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<sensor::Channel> attribute(const std::vector<sensor::SensorFrame>& frames, std::int64_t before_t,
                                       std::int64_t after_t) {
  std::set<sensor::Channel> seen;
  for (const auto& f : frames) {
    if (f.t > before_t && f.t <= after_t) seen.insert(f.channel);
  }
  return {seen.begin(), seen.end()};
}

std::vector<Change> diff_trees(const std::vector<UiElement>& before, const std::vector<UiElement>& after) {
  std::vector<Change> out;
  diff_level(before, after, "", out);
  return out;
}

DiffReport diff_snapshots(const device::UiSnapshot& before, const device::UiSnapshot& after,
                          const std::vector<sensor::SensorFrame>& frames) {
  if (before.app_id != after.app_id) {
    throw Error(Errc::app_mismatch, "cannot diff " + before.app_id + " against " + after.app_id);
  }
  DiffReport r;
  r.app_id = before.app_id;
  r.before_ref = snapshot_ref(before);
  r.after_ref = snapshot_ref(after);
  r.before_t = before.t;
  r.after_t = after.t;
  r.changes = diff_trees(before.ui_state, after.ui_state);
  r.attribution = attribute(frames, before.t, after.t);
  if (r.changes.empty()) {
    r.verdict = Verdict::no_change;
  } else {
    r.verdict = r.attribution.empty() ? Verdict::inconclusive : Verdict::adapted;
  }
  r.narrative = narrate(r);
  return r;
}

Json to_json(const Change& c) {
  Json j;
  j["path"] = c.path;
  j["change"] = to_string(c.kind);
  j["before"] = c.before ? Json(*c.before) : Json(nullptr);
  j["after"] = c.after ? Json(*c.after) : Json(nullptr);
  j["moved"] = c.moved;
  return j;
}

Json to_json(const DiffReport& r) {
  Json j;
  j["schema"] = kDiffSchemaVersion;
  j["app_id"] = r.app_id;
  j["before"] = r.before_ref;
  j["after"] = r.after_ref;
  j["before_t"] = r.before_t;
  j["after_t"] = r.after_t;
  Json changes = Json::array();
  for (const auto& c : r.changes) changes.push_back(to_json(c));
  j["changes"] = changes;
  Json attribution = Json::array();
  for (auto c : r.attribution) attribution.push_back(sensor::to_string(c));
  j["attribution"] = attribution;
  j["verdict"] = to_string(r.verdict);
  j["narrative"] = r.narrative;
  return j;
}

DiffReport diff_report_from_json(const Json& j) {
  try {
    if (j.at("schema").get<int>() != kDiffSchemaVersion) throw Error(Errc::parse_error, "unsupported diff schema");
    DiffReport r;
    r.app_id = j.at("app_id").get<std::string>();
    r.before_ref = j.at("before").get<std::string>();
    r.after_ref = j.at("after").get<std::string>();
    r.before_t = j.at("before_t").get<std::int64_t>();
    r.after_t = j.at("after_t").get<std::int64_t>();
    for (const auto& c : j.at("changes")) {
      const auto kind = c.at("change").get<std::string>();
      Change ch;
      ch.path = c.at("path").get<std::string>();
      if (kind == "added") {
        ch.kind = ChangeKind::added;
      } else if (kind == "removed") {
        ch.kind = ChangeKind::removed;
      } else if (kind == "modified") {
        ch.kind = ChangeKind::modified;
      } else {
        throw Error(Errc::parse_error, "unknown change kind " + kind);
      }
      ch.before = optional_text(c, "before");
      ch.after = optional_text(c, "after");
      ch.moved = c.at("moved").get<bool>();
      r.changes.push_back(std::move(ch));
    }
    for (const auto& name : j.at("attribution")) {
      const auto c = sensor::parse_channel(name.get<std::string>());
      if (!c) throw Error(Errc::parse_error, "unknown channel in attribution");
      r.attribution.push_back(*c);
    }
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict == "no_change") {
      r.verdict = Verdict::no_change;
    } else if (verdict == "adapted") {
      r.verdict = Verdict::adapted;
    } else if (verdict == "inconclusive") {
      r.verdict = Verdict::inconclusive;
    } else {
      throw Error(Errc::parse_error, "unknown verdict " + verdict);
    }
    r.narrative = j.at("narrative").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("diff report: ") + e.what());
  }
}

}  // namespace sandbox::analysis
