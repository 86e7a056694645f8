#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace ag {

enum class CheckStatus { pass, fail, skipped, inconclusive };

inline const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct CheckItem {
  std::string id;
  CheckStatus status = CheckStatus::pass;
  std::string residual;  // serialized offending value when status == fail
  double timing_ms = 0.0;
};

/// A batch of named checks. Items are kept sorted by id so that emitted
/// reports are deterministic.
struct VerificationReport {
  std::vector<CheckItem> items;

  void add(std::string id, bool ok, std::string residual = {}) {
    items.push_back({std::move(id), ok ? CheckStatus::pass : CheckStatus::fail,
                     ok ? std::string{} : std::move(residual), 0.0});
  }
  void add_status(std::string id, CheckStatus status, std::string detail = {}) {
    items.push_back({std::move(id), status, std::move(detail), 0.0});
  }
  void merge(const VerificationReport& other, const std::string& prefix = {}) {
    for (CheckItem item : other.items) {
      item.id = prefix + item.id;
      items.push_back(std::move(item));
    }
  }
  void sort() {
    std::stable_sort(items.begin(), items.end(),
                     [](const CheckItem& a, const CheckItem& b) { return a.id < b.id; });
  }
  bool passed() const {
    for (const auto& item : items)
      if (item.status == CheckStatus::fail) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t k = 0;
    for (const auto& item : items)
      if (item.status == CheckStatus::fail) ++k;
    return k;
  }
};

}  // namespace ag
