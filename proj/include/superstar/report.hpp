#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace superstar {

enum class Status { pass, fail, skip };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::skip:
      return "skip";
  }
  return "?";
}

struct CheckRecord {
  std::string check_id;
  std::string category;
  Status status = Status::pass;
  std::string lhs;
  std::string rhs;
  std::string detail;
};

struct VerificationReport {
  std::string model;
  std::vector<CheckRecord> records;

  bool passed() const {
    for (const auto& r : records)
      if (r.status == Status::fail) return false;
    return true;
  }
  std::size_t count(Status s) const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.status == s;
    return n;
  }
  const CheckRecord* find(std::string_view id) const {
    for (const auto& r : records)
      if (r.check_id == id) return &r;
    return nullptr;
  }
};

/// `lhs = rhs : status`, with the detail appended in parentheses when present.
inline std::string human_line(const CheckRecord& r) {
  std::string s = r.lhs + " = " + r.rhs + " : " + std::string(to_string(r.status));
  if (!r.detail.empty()) s += " (" + r.detail + ")";
  return s;
}

inline nlohmann::ordered_json to_json(const CheckRecord& r) {
  nlohmann::ordered_json j;
  j["check_id"] = r.check_id;
  j["category"] = r.category;
  j["status"] = to_string(r.status);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["detail"] = r.detail;
  return j;
}

/// One record per line; `quiet` keeps only failures.
inline void write_report(std::ostream& out, const VerificationReport& report, bool json,
                         bool quiet) {
  for (const auto& r : report.records) {
    if (quiet && r.status != Status::fail) continue;
    if (json)
      out << to_json(r).dump() << '\n';
    else
      out << human_line(r) << '\n';
  }
  if (!json && !quiet)
    out << report.model << ": " << report.count(Status::pass) << " passed, "
        << report.count(Status::fail) << " failed, " << report.count(Status::skip)
        << " skipped\n";
}

}  // namespace superstar
