#pragma once

// Structured pass/fail records for the verification suite. Checks of
// conjectural identities carry their own status values so a mismatch there
// never counts as a hard failure.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace qaffine {

enum class CheckStatus { Pass, Fail, ConjecturalPass, ConjecturalFail, Skipped };

std::string to_string(CheckStatus s);

struct CheckRecord {
  std::string check_id;
  CheckStatus status = CheckStatus::Skipped;
  std::string details;
};

struct SuiteReport {
  std::vector<CheckRecord> records;

  void add(std::string check_id, CheckStatus status, std::string details = "");
  // Pass/fail rolled up over records; conjectural failures do not count.
  bool hard_failure() const;
  // Canonical order: sorted by check_id.
  void sort();
  nlohmann::json to_json() const;
  std::string text() const;
};

}  // namespace qaffine
