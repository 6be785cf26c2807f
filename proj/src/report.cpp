#include "rdiff/report.hpp"

#include <stdexcept>

namespace rdiff {

const char* rel_symbol(Rel r) {
  switch (r) {
    case Rel::LT: return "<";
    case Rel::LE: return "<=";
    case Rel::EQ: return "==";
    case Rel::GE: return ">=";
    case Rel::GT: return ">";
  }
  return "?";
}

bool holds(const Scalar& lhs, Rel r, const Scalar& rhs) {
  switch (r) {
    case Rel::LT: return lhs < rhs;
    case Rel::LE: return lhs <= rhs;
    case Rel::EQ: return lhs == rhs;
    case Rel::GE: return lhs >= rhs;
    case Rel::GT: return lhs > rhs;
  }
  return false;
}

Check& LemmaReport::add(std::string name, const Scalar& lhs, Rel rel, const Scalar& rhs, std::string note) {
  checks.push_back(Check{std::move(name), lhs, rel, rhs, holds(lhs, rel, rhs), std::move(note)});
  return checks.back();
}

Check& LemmaReport::add_flag(std::string name, bool ok, std::string note) {
  return add(std::move(name), Scalar(ok ? 1 : 0), Rel::EQ, Scalar(1), std::move(note));
}

void LemmaReport::merge(const LemmaReport& other, const std::string& prefix) {
  for (auto c : other.checks) {
    if (!prefix.empty()) c.name = prefix + c.name;
    checks.push_back(std::move(c));
  }
}

bool LemmaReport::pass() const { return failures() == 0; }

std::size_t LemmaReport::failures() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += !c.pass;
  return n;
}

const Check* LemmaReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.pass) return &c;
  return nullptr;
}

const Check* LemmaReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json to_json(const Scalar& v) { return to_string(v); }

nlohmann::json to_json(const Rect& r) {
  return nlohmann::json::array({to_string(r.x0), to_string(r.x1), to_string(r.y0), to_string(r.y1)});
}

nlohmann::json to_json(const PointZ& z) { return nlohmann::json::array({to_string(z.x), to_string(z.y)}); }

nlohmann::json to_json(const RectUnion& u) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : u.cells()) a.push_back(to_json(c));
  return a;
}

nlohmann::json to_json(const StepFunction2D& f) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& t : f.terms()) a.push_back({{"rect", to_json(t.rect)}, {"weight", to_string(t.weight)}});
  return a;
}

nlohmann::json to_json(const Check& c) {
  nlohmann::json j{{"name", c.name},
                   {"lhs", to_string(c.lhs)},
                   {"rel", rel_symbol(c.rel)},
                   {"rhs", to_string(c.rhs)},
                   {"pass", c.pass}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

nlohmann::json to_json(const LemmaReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  nlohmann::json j{{"title", r.title}, {"pass", r.pass()}, {"checks", checks}};
  if (!r.extra.empty()) j["extra"] = r.extra;
  return j;
}

Scalar scalar_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_scalar(j.get<std::string>());
  if (j.is_number_integer()) return Scalar(j.get<long>());
  throw std::invalid_argument("expected a rational string");
}

Rect rect_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("rectangle must be [x0, x1, y0, y1]");
  return Rect{scalar_from_json(j[0]), scalar_from_json(j[1]), scalar_from_json(j[2]), scalar_from_json(j[3])};
}

}  // namespace rdiff
