#pragma once

#include "rdiff/geometry.hpp"
#include "rdiff/scalar.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rdiff {

enum class Rel { LT, LE, EQ, GE, GT };

const char* rel_symbol(Rel r);
bool holds(const Scalar& lhs, Rel r, const Scalar& rhs);

// One exact inequality with both operands kept.
struct Check {
  std::string name;
  Scalar lhs;
  Rel rel = Rel::LE;
  Scalar rhs;
  bool pass = false;
  std::string note;
};

struct LemmaReport {
  std::string title;
  std::vector<Check> checks;
  nlohmann::json extra = nlohmann::json::object();

  Check& add(std::string name, const Scalar& lhs, Rel rel, const Scalar& rhs, std::string note = {});
  // Records a boolean fact as 1 == 1 / 0 == 1 so reports stay uniform.
  Check& add_flag(std::string name, bool ok, std::string note = {});
  void merge(const LemmaReport& other, const std::string& prefix = {});
  bool pass() const;
  std::size_t failures() const;
  const Check* first_failure() const;
  const Check* find(const std::string& name) const;
};

nlohmann::json to_json(const Scalar& v);
nlohmann::json to_json(const Rect& r);
nlohmann::json to_json(const PointZ& z);
nlohmann::json to_json(const RectUnion& u);
nlohmann::json to_json(const StepFunction2D& f);
nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const LemmaReport& r);

Scalar scalar_from_json(const nlohmann::json& j);
Rect rect_from_json(const nlohmann::json& j);

}  // namespace rdiff
