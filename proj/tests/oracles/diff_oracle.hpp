#pragma once

// Brute-force reference for tree diffs: enumerate every node path in both
// trees and compare the two maps. Deliberately shares no code with the engine.

#include "sandbox/device/ui.hpp"

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

struct NodeContent {
  std::string kind;
  std::string text;
  std::map<std::string, std::string> attrs;
  bool operator==(const NodeContent& o) const { return std::tie(kind, text, attrs) == std::tie(o.kind, o.text, o.attrs); }
};

inline void enumerate_paths(const std::vector<sandbox::device::UiElement>& siblings, const std::string& prefix,
                            std::map<std::string, NodeContent>& out) {
  for (std::size_t i = 0; i < siblings.size(); ++i) {
    const auto& e = siblings[i];
    std::size_t same_kind_before = 0;
    for (std::size_t k = 0; k < i; ++k) same_kind_before += siblings[k].kind == e.kind ? 1 : 0;
    const std::string kind(sandbox::device::to_string(e.kind));
    const std::string path = prefix + "/" + kind + "#" + std::to_string(same_kind_before);
    out[path] = NodeContent{kind, e.text, e.attrs};
    enumerate_paths(e.children, path, out);
  }
}

inline std::string parent_of(const std::string& path) { return path.substr(0, path.rfind('/')); }

// Position of `path` in its parent's child list, counting only siblings whose
// paths also appear in `other`.
inline std::size_t shared_rank(const std::vector<std::string>& order, const std::map<std::string, NodeContent>& other,
                               const std::string& path) {
  std::size_t rank = 0;
  for (const auto& p : order) {
    if (p == path) return rank;
    if (parent_of(p) == parent_of(path) && other.count(p)) ++rank;
  }
  return rank;
}

inline void enumerate_order(const std::vector<sandbox::device::UiElement>& siblings, const std::string& prefix,
                            std::vector<std::string>& out) {
  for (std::size_t i = 0; i < siblings.size(); ++i) {
    std::size_t same_kind_before = 0;
    for (std::size_t k = 0; k < i; ++k) same_kind_before += siblings[k].kind == siblings[i].kind ? 1 : 0;
    const std::string path =
        prefix + "/" + std::string(sandbox::device::to_string(siblings[i].kind)) + "#" + std::to_string(same_kind_before);
    out.push_back(path);
    enumerate_order(siblings[i].children, path, out);
  }
}

// (path, "added" | "removed" | "modified")
using ChangeSet = std::set<std::pair<std::string, std::string>>;

inline ChangeSet brute_force_changes(const std::vector<sandbox::device::UiElement>& before,
                                     const std::vector<sandbox::device::UiElement>& after) {
  std::map<std::string, NodeContent> a, b;
  enumerate_paths(before, "", a);
  enumerate_paths(after, "", b);
  std::vector<std::string> a_order, b_order;
  enumerate_order(before, "", a_order);
  enumerate_order(after, "", b_order);
  ChangeSet out;
  for (const auto& [path, content] : a) {
    const auto it = b.find(path);
    if (it == b.end()) {
      out.insert({path, "removed"});
    } else if (!(it->second == content) || shared_rank(a_order, b, path) != shared_rank(b_order, a, path)) {
      out.insert({path, "modified"});
    }
  }
  for (const auto& [path, content] : b) {
    if (!a.count(path)) out.insert({path, "added"});
  }
  return out;
}

// Naive classification: identical trees or not.
inline bool trees_equal(const std::vector<sandbox::device::UiElement>& before,
                        const std::vector<sandbox::device::UiElement>& after) {
  return before == after;
}

}  // namespace oracle
