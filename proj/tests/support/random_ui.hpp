#pragma once

// Random UI trees and perturbed copies for diff property tests.

#include "sandbox/common/rng.hpp"
#include "sandbox/device/ui.hpp"

#include <string>
#include <vector>

namespace support {

inline sandbox::device::ElementKind random_kind(sandbox::Rng& rng) {
  return static_cast<sandbox::device::ElementKind>(rng.uniform_int(0, 6));
}

inline std::string random_text(sandbox::Rng& rng) {
  static const char* kWords[] = {"Steps", "Forecast", "night", "day", "CAD", "USD", "Post", "Shop", "", "fare"};
  return std::string(kWords[rng.uniform_int(0, 9)]) + (rng.bernoulli(0.5) ? " " + std::to_string(rng.uniform_int(0, 9)) : "");
}

inline sandbox::device::UiElement random_element(sandbox::Rng& rng, std::size_t depth, std::size_t max_depth) {
  sandbox::device::UiElement e;
  e.kind = random_kind(rng);
  e.text = random_text(rng);
  if (rng.bernoulli(0.4)) e.attrs["k" + std::to_string(rng.uniform_int(0, 2))] = std::to_string(rng.uniform_int(0, 3));
  if (depth < max_depth) {
    // Mostly shallow, with an occasional deep chain.
    const auto n = rng.bernoulli(0.15) ? 1 : rng.uniform_int(0, depth < 3 ? 3 : 1);
    for (std::int64_t i = 0; i < n; ++i) e.children.push_back(random_element(rng, depth + 1, max_depth));
  }
  return e;
}

inline std::vector<sandbox::device::UiElement> random_tree(sandbox::Rng& rng) {
  std::vector<sandbox::device::UiElement> roots;
  const auto max_depth = static_cast<std::size_t>(rng.uniform_int(1, sandbox::device::kMaxTreeDepth));
  const auto n = rng.uniform_int(0, 5);
  for (std::int64_t i = 0; i < n; ++i) roots.push_back(random_element(rng, 1, max_depth));
  return roots;
}

// Collects pointers to every sibling list so edits can land at any depth.
inline void sibling_lists(std::vector<sandbox::device::UiElement>& list,
                          std::vector<std::vector<sandbox::device::UiElement>*>& out, std::size_t depth = 1) {
  out.push_back(&list);
  if (depth >= sandbox::device::kMaxTreeDepth) return;
  for (auto& e : list) sibling_lists(e.children, out, depth + 1);
}

// Copy of `tree` with 0..3 random edits; with 0 edits the copy is identical.
inline std::vector<sandbox::device::UiElement> perturb(const std::vector<sandbox::device::UiElement>& tree,
                                                      sandbox::Rng& rng) {
  auto out = tree;
  const auto edits = rng.uniform_int(0, 3);
  for (std::int64_t k = 0; k < edits; ++k) {
    std::vector<std::vector<sandbox::device::UiElement>*> lists;
    sibling_lists(out, lists);
    auto& list = *lists[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(lists.size()) - 1))];
    const auto op = rng.uniform_int(0, 5);
    if (list.empty() || op == 0) {
      list.insert(list.begin() + rng.uniform_int(0, static_cast<std::int64_t>(list.size())), random_element(rng, 15, 16));
      continue;
    }
    auto& e = list[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(list.size()) - 1))];
    switch (op) {
      case 1: e.text = random_text(rng); break;  // may be a no-op
      case 2: e.attrs["k9"] = std::to_string(rng.uniform_int(0, 1)); break;
      case 3: e.kind = random_kind(rng); break;
      case 4: list.erase(list.begin() + (&e - list.data())); break;
      default: std::swap(list.front(), list.back()); break;
    }
  }
  return out;
}

}  // namespace support
