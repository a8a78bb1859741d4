#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "entrolab/entropy.hpp"

namespace entrolab {

/// Shortest text that reads back as exactly `x`.
inline std::string format_value(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// How lhs and rhs are meant to relate.
enum class Relation { less_equal, greater_equal, equal };

enum class Status { pass, fail, inapplicable };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::greater_equal: return ">=";
    case Relation::equal: return "==";
  }
  return "?";
}

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inapplicable: return "inapplicable";
  }
  return "?";
}

/// One evaluated inequality (or identity). `slack` is oriented so that a
/// nonnegative value means satisfied; for identities it is -|lhs - rhs|.
/// `links` holds the intermediate inequalities a checker verified on the
/// way to its headline claim.
struct InequalityReport {
  std::string name;
  ExtendedReal lhs;
  ExtendedReal rhs;
  Relation relation = Relation::less_equal;
  double slack = 0.0;
  double tolerance = 0.0;
  Status status = Status::pass;
  std::map<std::string, std::string> metadata;
  std::vector<InequalityReport> links;

  bool pass() const { return status == Status::pass; }
  bool failed() const { return status == Status::fail; }
  bool applicable() const { return status != Status::inapplicable; }

  /// Headline and every link pass (inapplicable links are skipped).
  bool all_pass() const {
    if (failed()) return false;
    for (const auto& l : links)
      if (!l.all_pass()) return false;
    return true;
  }
};

/// Builds a report. +inf on the greater side passes outright; +inf on the
/// lesser side (or in an identity) makes the report inapplicable.
inline InequalityReport make_report(std::string name, ExtendedReal lhs, ExtendedReal rhs,
                                    Relation relation, double tolerance) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.relation = relation;
  r.tolerance = tolerance;
  const ExtendedReal& lesser = relation == Relation::greater_equal ? rhs : lhs;
  const ExtendedReal& greater = relation == Relation::greater_equal ? lhs : rhs;
  if (relation == Relation::equal) {
    if (lhs.is_infinite() || rhs.is_infinite()) {
      r.status = Status::inapplicable;
      r.slack = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
    r.slack = -std::abs(lhs.value() - rhs.value());
  } else if (lesser.is_infinite()) {
    r.status = Status::inapplicable;
    r.slack = std::numeric_limits<double>::quiet_NaN();
    return r;
  } else if (greater.is_infinite()) {
    r.slack = std::numeric_limits<double>::infinity();
  } else {
    r.slack = greater.value() - lesser.value();
  }
  r.status = r.slack >= -tolerance ? Status::pass : Status::fail;
  return r;
}

inline InequalityReport make_inapplicable(std::string name, std::string reason) {
  InequalityReport r;
  r.name = std::move(name);
  r.status = Status::inapplicable;
  r.slack = std::numeric_limits<double>::quiet_NaN();
  r.metadata["reason"] = std::move(reason);
  return r;
}

/// Tolerances used by the checkers. Identity checks compare two routes to
/// the same quantity; inequality checks compare two sides of a bound.
struct Tolerances {
  double inequality = 1e-9;
  double identity = 1e-9;
  double composite = 4e-9;
  double fixed_point = 1e-9;

  /// Sets a tolerance by name; returns false for unknown names or values
  /// that are negative or not finite.
  bool set(const std::string& name, double value) {
    if (!std::isfinite(value) || value < 0.0) return false;
    if (name == "inequality") inequality = value;
    else if (name == "identity") identity = value;
    else if (name == "composite") composite = value;
    else if (name == "fixed_point") fixed_point = value;
    else return false;
    return true;
  }
};

inline void to_json(nlohmann::json& j, const Tolerances& t) {
  j = nlohmann::json{{"inequality", t.inequality},
                     {"identity", t.identity},
                     {"composite", t.composite},
                     {"fixed_point", t.fixed_point}};
}

/// JSON numbers cannot be infinite or NaN; those become the strings "+inf" and "nan".
inline nlohmann::json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  return x;
}

inline nlohmann::json json_number(const ExtendedReal& x) { return json_number(x.as_double()); }

inline void to_json(nlohmann::json& j, const InequalityReport& r) {
  j = nlohmann::json{{"name", r.name},
                     {"lhs", json_number(r.lhs)},
                     {"relation", to_string(r.relation)},
                     {"rhs", json_number(r.rhs)},
                     {"slack", json_number(r.slack)},
                     {"tolerance", r.tolerance},
                     {"status", to_string(r.status)}};
  if (!r.metadata.empty()) j["metadata"] = r.metadata;
  if (!r.links.empty()) j["links"] = r.links;
}

/// Depth-first flattening: headline first, then its links.
inline void flatten_reports(const InequalityReport& r, std::vector<const InequalityReport*>& out) {
  out.push_back(&r);
  for (const auto& l : r.links) flatten_reports(l, out);
}

}  // namespace entrolab
