#include "qaffine/report.hpp"

#include <algorithm>
#include <sstream>

namespace qaffine {

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::ConjecturalPass: return "conjectural-pass";
    case CheckStatus::ConjecturalFail: return "conjectural-fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

void SuiteReport::add(std::string check_id, CheckStatus status, std::string details) {
  records.push_back({std::move(check_id), status, std::move(details)});
}

bool SuiteReport::hard_failure() const {
  return std::any_of(records.begin(), records.end(),
                     [](const CheckRecord& r) { return r.status == CheckStatus::Fail; });
}

void SuiteReport::sort() {
  std::stable_sort(records.begin(), records.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.check_id < b.check_id; });
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"check_id", r.check_id},
                   {"status", to_string(r.status)},
                   {"details", r.details}});
  }
  return {{"checks", arr}, {"hard_failure", hard_failure()}};
}

std::string SuiteReport::text() const {
  std::ostringstream os;
  for (const auto& r : records) {
    os << "[" << to_string(r.status) << "] " << r.check_id;
    if (!r.details.empty()) os << " : " << r.details;
    os << "\n";
  }
  return os.str();
}

}  // namespace qaffine
