#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "voxelsoft/common.hpp"

namespace voxelsoft {

// Voxel codes. Row-major grids with row 0 at the bottom (gravity pulls
// toward decreasing row index).
enum Voxel : uint8_t {
  kEmpty = 0,
  kRigid = 1,
  kSoft = 2,
  kActuatorH = 3,  // expands/contracts along x
  kActuatorV = 4,  // expands/contracts along y
};

constexpr double kStiffnessMin = 0.5;
constexpr double kStiffnessMax = 2.0;

inline bool is_actuator(uint8_t code) {
  return code == kActuatorH || code == kActuatorV;
}

struct Morphology {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> cells;  // row-major, row 0 = bottom

  Morphology() = default;
  Morphology(int w, int h, uint8_t fill = kEmpty)
      : width(w), height(h), cells(size_t(w) * size_t(h), fill) {}

  uint8_t at(int i, int j) const { return cells[size_t(j) * width + i]; }
  uint8_t& at(int i, int j) { return cells[size_t(j) * width + i]; }
  bool occupied(int i, int j) const { return at(i, j) != kEmpty; }
  bool in_bounds(int i, int j) const {
    return i >= 0 && i < width && j >= 0 && j < height;
  }

  int occupied_count() const {
    return int(std::count_if(cells.begin(), cells.end(),
                             [](uint8_t c) { return c != kEmpty; }));
  }
  int actuator_count() const {
    return int(std::count_if(cells.begin(), cells.end(),
                             [](uint8_t c) { return is_actuator(c); }));
  }

  bool operator==(const Morphology& o) const = default;
};

struct StiffnessField {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, one factor per cell

  StiffnessField() = default;
  StiffnessField(int w, int h, double fill = 1.0)
      : width(w), height(h), values(size_t(w) * size_t(h), fill) {}

  double at(int i, int j) const { return values[size_t(j) * width + i]; }
  double& at(int i, int j) { return values[size_t(j) * width + i]; }

  bool operator==(const StiffnessField& o) const = default;
};

struct RobotDesign {
  Morphology morphology;
  StiffnessField stiffness;
  std::string id;
  std::string parent_id;  // empty when unset

  bool operator==(const RobotDesign& o) const = default;
};

// ---------------------------------------------------------------------------
// validation

enum class Rule {
  kDimensionMismatch,
  kCellCodeOutOfRange,
  kNoOccupiedVoxels,
  kDisconnected,
  kNoActuator,
  kStiffnessOutOfRange,
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::kDimensionMismatch: return "DimensionMismatch";
    case Rule::kCellCodeOutOfRange: return "CellCodeOutOfRange";
    case Rule::kNoOccupiedVoxels: return "NoOccupiedVoxels";
    case Rule::kDisconnected: return "Disconnected";
    case Rule::kNoActuator: return "NoActuator";
    case Rule::kStiffnessOutOfRange: return "StiffnessOutOfRange";
  }
  return "?";
}

struct Violation {
  Rule rule;
  std::vector<std::pair<int, int>> cells;  // offending (i, j), may be empty
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(Rule r) const {
    for (const auto& v : violations)
      if (v.rule == r) return true;
    return false;
  }
  std::string summary() const {
    if (ok()) return "ok";
    std::string s;
    for (const auto& v : violations) {
      if (!s.empty()) s += "; ";
      s += rule_name(v.rule);
      if (!v.cells.empty()) {
        s += " at";
        for (const auto& [i, j] : v.cells) {
          s += " (" + std::to_string(i) + "," + std::to_string(j) + ")";
        }
      }
    }
    return s;
  }
};

// Checks every design invariant: matching grid shapes, cell codes in
// {0..4}, a single 4-connected occupied component, at least one actuator,
// stiffness factors within [0.5, 2].
inline ValidationResult validate_design(const RobotDesign& d) {
  ValidationResult res;
  const Morphology& m = d.morphology;

  if (m.width != d.stiffness.width || m.height != d.stiffness.height ||
      m.cells.size() != size_t(m.width) * size_t(m.height) ||
      d.stiffness.values.size() !=
          size_t(d.stiffness.width) * size_t(d.stiffness.height)) {
    res.violations.push_back({Rule::kDimensionMismatch, {}});
    return res;  // cell-level checks are meaningless on mismatched grids
  }

  Violation bad_codes{Rule::kCellCodeOutOfRange, {}};
  Violation bad_stiff{Rule::kStiffnessOutOfRange, {}};
  for (int j = 0; j < m.height; ++j) {
    for (int i = 0; i < m.width; ++i) {
      if (m.at(i, j) > kActuatorV) bad_codes.cells.emplace_back(i, j);
      double s = d.stiffness.at(i, j);
      if (!(s >= kStiffnessMin && s <= kStiffnessMax)) {
        bad_stiff.cells.emplace_back(i, j);
      }
    }
  }
  if (!bad_codes.cells.empty()) res.violations.push_back(std::move(bad_codes));
  if (!bad_stiff.cells.empty()) res.violations.push_back(std::move(bad_stiff));

  int occupied = m.occupied_count();
  if (occupied == 0) {
    res.violations.push_back({Rule::kNoOccupiedVoxels, {}});
    return res;
  }

  // flood fill (4-adjacency) from the first occupied cell
  std::vector<uint8_t> seen(m.cells.size(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int j = 0; j < m.height && stack.empty(); ++j) {
    for (int i = 0; i < m.width && stack.empty(); ++i) {
      if (m.occupied(i, j)) {
        stack.emplace_back(i, j);
        seen[size_t(j) * m.width + i] = 1;
      }
    }
  }
  int reached = 0;
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    ++reached;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int ni = i + di[k], nj = j + dj[k];
      if (m.in_bounds(ni, nj) && m.occupied(ni, nj) &&
          !seen[size_t(nj) * m.width + ni]) {
        seen[size_t(nj) * m.width + ni] = 1;
        stack.emplace_back(ni, nj);
      }
    }
  }
  if (reached != occupied) {
    Violation v{Rule::kDisconnected, {}};
    for (int j = 0; j < m.height; ++j)
      for (int i = 0; i < m.width; ++i)
        if (m.occupied(i, j) && !seen[size_t(j) * m.width + i])
          v.cells.emplace_back(i, j);
    res.violations.push_back(std::move(v));
  }

  if (m.actuator_count() == 0) {
    res.violations.push_back({Rule::kNoActuator, {}});
  }
  return res;
}

// ---------------------------------------------------------------------------
// stiffness clamping

inline double clamp_stiffness_value(double v) {
  return std::min(kStiffnessMax, std::max(kStiffnessMin, v));
}

inline StiffnessField clamp_stiffness(const StiffnessField& raw) {
  StiffnessField out = raw;
  for (double& v : out.values) v = clamp_stiffness_value(v);
  return out;
}

inline StiffnessField clamp_stiffness(int width, int height,
                                      std::vector<double> raw) {
  StiffnessField out;
  out.width = width;
  out.height = height;
  out.values = std::move(raw);
  for (double& v : out.values) v = clamp_stiffness_value(v);
  return out;
}

// ---------------------------------------------------------------------------
// serialization
//
// Design file format: JSON object with `width`, `height`, `cells` (row-major
// integers, row 0 = bottom), `stiffness` (row-major numbers), `id` and
// optional `parent_id`. Numbers round-trip exactly.

inline nlohmann::json design_to_json(const RobotDesign& d) {
  nlohmann::json j;
  j["width"] = d.morphology.width;
  j["height"] = d.morphology.height;
  j["cells"] = std::vector<int>(d.morphology.cells.begin(),
                                d.morphology.cells.end());
  j["stiffness"] = d.stiffness.values;
  j["id"] = d.id;
  if (!d.parent_id.empty()) j["parent_id"] = d.parent_id;
  return j;
}

inline std::string serialize_design(const RobotDesign& d) {
  return design_to_json(d).dump(2) + "\n";
}

inline RobotDesign design_from_json(const nlohmann::json& j) {
  RobotDesign d;
  try {
    int w = j.at("width").get<int>();
    int h = j.at("height").get<int>();
    if (w <= 0 || h <= 0) throw ParseError("width/height must be positive");
    auto cells = j.at("cells").get<std::vector<int>>();
    auto stiff = j.at("stiffness").get<std::vector<double>>();
    if (cells.size() != size_t(w) * size_t(h))
      throw ParseError("field `cells`: expected " + std::to_string(w * h) +
                       " entries, got " + std::to_string(cells.size()));
    if (stiff.size() != size_t(w) * size_t(h))
      throw ParseError("field `stiffness`: expected " + std::to_string(w * h) +
                       " entries, got " + std::to_string(stiff.size()));
    for (size_t k = 0; k < cells.size(); ++k) {
      if (cells[k] < 0 || cells[k] > 255)
        throw ParseError("field `cells`[" + std::to_string(k) +
                         "]: not a voxel code");
    }
    d.morphology.width = w;
    d.morphology.height = h;
    d.morphology.cells.assign(cells.begin(), cells.end());
    d.stiffness.width = w;
    d.stiffness.height = h;
    d.stiffness.values = std::move(stiff);
    d.id = j.value("id", std::string{});
    d.parent_id = j.value("parent_id", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("design document: ") + e.what());
  }
  ValidationResult v = validate_design(d);
  if (!v.ok()) throw ValidationError("invalid design: " + v.summary());
  return d;
}

inline RobotDesign deserialize_design(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("design document: ") + e.what());
  }
  return design_from_json(j);
}

}  // namespace voxelsoft
