#pragma once

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ozcheck/errors.hpp"

namespace ozcheck {

using Json = nlohmann::ordered_json;

struct RelationResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::optional<double> worst_t;
  std::vector<double> curve;  // per-fibre residuals when available, not serialized
};

/// Named residuals checked against tolerances. Insertion order is preserved so
/// serialized reports are deterministic.
class RelationReport {
 public:
  void add(std::string name, double residual, double tolerance,
           std::optional<double> worst_t = std::nullopt) {
    // NaN never passes.
    const bool pass = residual <= tolerance;
    entries_.push_back({std::move(name), residual, tolerance, pass, worst_t});
  }

  /// As add, keeping the per-fibre residuals for plotting.
  void add_curve(std::string name, std::vector<double> curve, double residual, double tolerance,
                 std::optional<double> worst_t) {
    add(std::move(name), residual, tolerance, worst_t);
    entries_.back().curve = std::move(curve);
  }

  /// Boolean outcome with no meaningful magnitude (residual 0 or 1).
  void add_flag(std::string name, bool ok, std::optional<double> where = std::nullopt) {
    entries_.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok, where});
  }

  void merge(const RelationReport& other, const std::string& prefix = {}) {
    for (const auto& e : other.entries_) {
      RelationResult copy = e;
      copy.name = prefix + e.name;
      entries_.push_back(std::move(copy));
    }
  }

  [[nodiscard]] bool all_pass() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.pass; });
  }

  [[nodiscard]] const std::vector<RelationResult>& entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  [[nodiscard]] bool contains(const std::string& name) const {
    return find(name) != nullptr;
  }

  [[nodiscard]] const RelationResult& at(const std::string& name) const {
    if (const auto* e = find(name)) return *e;
    throw std::out_of_range("no relation named '" + name + "'");
  }

  [[nodiscard]] double max_residual() const {
    double worst = 0.0;
    for (const auto& e : entries_) worst = std::max(worst, e.residual);
    return worst;
  }

  [[nodiscard]] std::vector<std::string> failures() const {
    std::vector<std::string> names;
    for (const auto& e : entries_)
      if (!e.pass) names.push_back(e.name);
    return names;
  }

  [[nodiscard]] Json to_json() const {
    Json out = Json::object();
    for (const auto& e : entries_) {
      Json item;
      item["residual"] = e.residual;
      item["tolerance"] = e.tolerance;
      item["pass"] = e.pass;
      item["worst_fibre_t"] = e.worst_t ? Json(*e.worst_t) : Json(nullptr);
      out[e.name] = std::move(item);
    }
    return out;
  }

 private:
  [[nodiscard]] const RelationResult* find(const std::string& name) const {
    for (const auto& e : entries_)
      if (e.name == name) return &e;
    return nullptr;
  }

  std::vector<RelationResult> entries_;
};

}  // namespace ozcheck
