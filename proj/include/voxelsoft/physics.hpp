#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "voxelsoft/common.hpp"
#include "voxelsoft/design.hpp"

namespace voxelsoft {

// ---------------------------------------------------------------------------
// parameters

struct SimParams {
  double dt = 1e-3;                   // s
  double gravity = 9.81;              // m/s^2, acts toward -y
  double spring_damping = 2.0;        // N*s/m, along the spring axis
  double ground_height = 0.0;         // m, flat-ground fallback
  double contact_stiffness = 1e5;     // N/m penalty
  double contact_damping = 50.0;      // N*s/m normal damping
  double friction_coefficient = 0.6;  // Coulomb cap
  double mass_per_corner = 0.25;      // kg
  double voxel_size = 0.1;            // m, edge length
  double k_base_soft = 1000.0;        // N/m, soft / actuator baseline
  double rigid_stiffness_ratio = 5.0; // rigid k_base = ratio * soft k_base
  // When false, actuator voxels keep a unit stiffness factor and the scaling
  // field only drives rigid/soft voxels.
  bool scale_actuator_stiffness = true;
};

// Actuators command a target length ratio relative to the nominal voxel
// edge; values outside this interval are clamped.
constexpr double kActuationMin = 0.6;
constexpr double kActuationMax = 1.6;

inline double clamp_actuation(double r) {
  return std::min(kActuationMax, std::max(kActuationMin, r));
}

// ---------------------------------------------------------------------------
// terrain
//
// Piecewise-constant ground height sampled on a uniform grid, with optional
// per-cell contact-stiffness scaling and an optional ceiling. An empty
// heights array means flat ground at `flat_height`.

struct Terrain {
  double flat_height = 0.0;
  double origin_x = 0.0;
  double cell_width = 0.1;
  std::vector<double> heights;
  std::vector<double> contact_scale;  // parallel to heights; empty = all 1
  std::vector<double> ceiling;        // empty = no ceiling; +inf = open

  static constexpr double kNoCeiling = std::numeric_limits<double>::infinity();

  int cell_index(double x) const {
    int n = int(heights.size());
    int i = int(std::floor((x - origin_x) / cell_width));
    return std::min(std::max(i, 0), n - 1);
  }

  double ground(double x) const {
    if (heights.empty()) return flat_height;
    return heights[cell_index(x)];
  }

  double stiffness_scale(double x) const {
    if (contact_scale.empty() || heights.empty()) return 1.0;
    return contact_scale[cell_index(x)];
  }

  double ceiling_at(double x) const {
    if (ceiling.empty()) return kNoCeiling;
    int n = int(ceiling.size());
    int i = int(std::floor((x - origin_x) / cell_width));
    if (i < 0 || i >= n) return kNoCeiling;
    return ceiling[i];
  }
};

// ---------------------------------------------------------------------------
// system layout

struct PointMass {
  Vec2 position;  // assembly (reference) position
  double mass = 0.0;
  bool fixed = false;
};

enum class SpringKind : uint8_t { kEdge, kDiagonal };
enum class SpringAxis : uint8_t { kX, kY, kNone };  // edge orientation

struct Spring {
  int a = -1;  // mass indices
  int b = -1;
  SpringKind kind = SpringKind::kEdge;
  SpringAxis axis = SpringAxis::kNone;
  double nominal_length = 0.0;  // unactuated rest length
  double rest_length = 0.0;     // current rest length (actuation applied)
  double k_base = 0.0;
  double k_effective = 0.0;
  int owner[2] = {-1, -1};  // indices into MassSpringSystem::voxels
};

struct VoxelRef {
  int i = 0;
  int j = 0;
  uint8_t code = kEmpty;
  double factor = 1.0;  // current stiffness scaling factor
  int corner[4] = {-1, -1, -1, -1};  // mass indices: bl, br, tl, tr
  std::vector<int> springs;          // all six spring indices
  int actuator_index = -1;           // position in actuator order, or -1
};

struct SimState {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  double t = 0.0;
  long step_count = 0;
  std::vector<uint8_t> contact;  // per-mass: touched ground/ceiling last step
};

struct MassSpringSystem {
  std::vector<PointMass> masses;
  std::vector<Spring> springs;
  std::vector<VoxelRef> voxels;  // occupied voxels, row-major from bottom row
  // (voxel index, axis) pairs in row-major order; axis kX for horizontal
  // actuators, kY for vertical.
  std::vector<std::pair<int, SpringAxis>> actuators;
  int grid_width = 0;
  int grid_height = 0;

  int voxel_slot(int i, int j) const {
    for (size_t k = 0; k < voxels.size(); ++k)
      if (voxels[k].i == i && voxels[k].j == j) return int(k);
    return -1;
  }
};

// ---------------------------------------------------------------------------
// stiffness rule
//
// Diagonal springs scale strictly by their owner voxel's factor; edge
// springs shared by two voxels use the average of the two factors; boundary
// edges with a single owner fall back to that owner's factor.

inline double effective_stiffness(SpringKind kind, double k_base,
                                  double s_local,
                                  std::optional<double> s_neighbor = {}) {
  if (kind == SpringKind::kDiagonal || !s_neighbor) return s_local * k_base;
  return 0.5 * (s_local + *s_neighbor) * k_base;
}

namespace detail {

inline double scaling_factor(const VoxelRef& v, const SimParams& params) {
  if (!params.scale_actuator_stiffness && is_actuator(v.code)) return 1.0;
  return v.factor;
}

}  // namespace detail

// Recomputes every spring's k_effective from the voxels' current factors.
// k_base is never touched.
inline void refresh_effective_stiffness(MassSpringSystem& sys,
                                        const SimParams& params) {
  for (Spring& s : sys.springs) {
    double f0 = detail::scaling_factor(sys.voxels[s.owner[0]], params);
    std::optional<double> f1;
    if (s.owner[1] >= 0)
      f1 = detail::scaling_factor(sys.voxels[s.owner[1]], params);
    s.k_effective = effective_stiffness(s.kind, s.k_base, f0, f1);
  }
}

// Installs a transient per-voxel stiffness field (one factor per occupied
// voxel, row-major order) and recomputes spring constants. Factors are
// clamped to the legal range.
inline void set_reactive_stiffness(MassSpringSystem& sys,
                                   std::span<const double> factors,
                                   const SimParams& params) {
  if (factors.size() != sys.voxels.size()) {
    throw ShapeMismatch("stiffness field: expected " +
                        std::to_string(sys.voxels.size()) + " factors, got " +
                        std::to_string(factors.size()));
  }
  for (size_t k = 0; k < factors.size(); ++k)
    sys.voxels[k].factor = clamp_stiffness_value(factors[k]);
  refresh_effective_stiffness(sys, params);
}

// ---------------------------------------------------------------------------
// assembly

// Builds the cross-braced lattice: corner masses deduplicated on the
// (W+1)x(H+1) corner grid, one shared edge spring per common face, two
// private diagonals per voxel. Throws ValidationError on invalid designs.
inline MassSpringSystem assemble(const RobotDesign& design,
                                 const SimParams& params = {}) {
  ValidationResult v = validate_design(design);
  if (!v.ok()) throw ValidationError("invalid design: " + v.summary());

  const Morphology& m = design.morphology;
  const double L = params.voxel_size;

  MassSpringSystem sys;
  sys.grid_width = m.width;
  sys.grid_height = m.height;

  auto base_constant = [&](uint8_t code) {
    return code == kRigid ? params.rigid_stiffness_ratio * params.k_base_soft
                          : params.k_base_soft;
  };

  // corner-node key -> mass index
  std::map<std::pair<int, int>, int> corner_index;
  auto corner = [&](int ci, int cj) {
    auto [it, inserted] = corner_index.try_emplace({ci, cj}, -1);
    if (inserted) {
      it->second = int(sys.masses.size());
      sys.masses.push_back(
          {Vec2(ci * L, cj * L), params.mass_per_corner, false});
    }
    return it->second;
  };

  // edge key (corner pair) -> spring index
  std::map<std::pair<int, int>, int> edge_index;

  for (int j = 0; j < m.height; ++j) {
    for (int i = 0; i < m.width; ++i) {
      if (!m.occupied(i, j)) continue;
      int slot = int(sys.voxels.size());
      VoxelRef ref;
      ref.i = i;
      ref.j = j;
      ref.code = m.at(i, j);
      ref.factor = clamp_stiffness_value(design.stiffness.at(i, j));
      int bl = corner(i, j), br = corner(i + 1, j);
      int tl = corner(i, j + 1), tr = corner(i + 1, j + 1);
      ref.corner[0] = bl;
      ref.corner[1] = br;
      ref.corner[2] = tl;
      ref.corner[3] = tr;

      auto add_edge = [&](int ma, int mb, SpringAxis axis) {
        auto key = std::minmax(ma, mb);
        auto [it, inserted] = edge_index.try_emplace(key, -1);
        if (inserted) {
          it->second = int(sys.springs.size());
          Spring s;
          s.a = ma;
          s.b = mb;
          s.kind = SpringKind::kEdge;
          s.axis = axis;
          s.nominal_length = L;
          s.rest_length = L;
          s.k_base = base_constant(ref.code);
          s.owner[0] = slot;
          sys.springs.push_back(s);
        } else {
          Spring& s = sys.springs[it->second];
          s.owner[1] = slot;
          // shared face: baseline constant is the mean of both owners'
          s.k_base = 0.5 * (s.k_base + base_constant(ref.code));
        }
        ref.springs.push_back(it->second);
      };

      add_edge(bl, br, SpringAxis::kX);  // bottom
      add_edge(tl, tr, SpringAxis::kX);  // top
      add_edge(bl, tl, SpringAxis::kY);  // left
      add_edge(br, tr, SpringAxis::kY);  // right

      auto add_diagonal = [&](int ma, int mb) {
        Spring s;
        s.a = ma;
        s.b = mb;
        s.kind = SpringKind::kDiagonal;
        s.axis = SpringAxis::kNone;
        s.nominal_length = L * std::numbers::sqrt2;
        s.rest_length = s.nominal_length;
        s.k_base = base_constant(ref.code);
        s.owner[0] = slot;
        ref.springs.push_back(int(sys.springs.size()));
        sys.springs.push_back(s);
      };
      add_diagonal(bl, tr);
      add_diagonal(br, tl);

      if (is_actuator(ref.code)) {
        ref.actuator_index = int(sys.actuators.size());
        sys.actuators.emplace_back(slot, ref.code == kActuatorH
                                             ? SpringAxis::kX
                                             : SpringAxis::kY);
      }
      sys.voxels.push_back(std::move(ref));
    }
  }

  refresh_effective_stiffness(sys, params);
  return sys;
}

inline SimState make_state(const MassSpringSystem& sys) {
  SimState st;
  st.positions.reserve(sys.masses.size());
  for (const PointMass& pm : sys.masses) st.positions.push_back(pm.position);
  st.velocities.assign(sys.masses.size(), Vec2{});
  st.contact.assign(sys.masses.size(), 0);
  return st;
}

// ---------------------------------------------------------------------------
// actuation
//
// Actuators modulate the rest length of their axis-aligned edge springs;
// a shared edge driven by two actuators uses the mean command. Diagonals
// follow the commanded box shape of their owner voxel.

inline void apply_actuation(MassSpringSystem& sys,
                            std::span<const double> ratios) {
  if (ratios.size() != sys.actuators.size()) {
    throw ShapeMismatch("actuation: expected " +
                        std::to_string(sys.actuators.size()) +
                        " ratios, got " + std::to_string(ratios.size()));
  }
  auto command = [&](const VoxelRef& v) {
    return clamp_actuation(ratios[v.actuator_index]);
  };
  for (Spring& s : sys.springs) {
    if (s.kind == SpringKind::kEdge) {
      double sum = 0.0;
      int n = 0;
      for (int o : {s.owner[0], s.owner[1]}) {
        if (o < 0) continue;
        const VoxelRef& v = sys.voxels[o];
        bool drives = (v.code == kActuatorH && s.axis == SpringAxis::kX) ||
                      (v.code == kActuatorV && s.axis == SpringAxis::kY);
        if (drives) {
          sum += command(v);
          ++n;
        }
      }
      s.rest_length = n > 0 ? s.nominal_length * (sum / n) : s.nominal_length;
    } else {
      const VoxelRef& v = sys.voxels[s.owner[0]];
      double side = s.nominal_length / std::numbers::sqrt2;
      if (v.code == kActuatorH) {
        s.rest_length = side * std::hypot(command(v), 1.0);
      } else if (v.code == kActuatorV) {
        s.rest_length = side * std::hypot(1.0, command(v));
      } else {
        s.rest_length = s.nominal_length;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// dynamics

namespace detail {

inline void check_finite(const SimState& st) {
  for (size_t i = 0; i < st.positions.size(); ++i) {
    const Vec2& p = st.positions[i];
    const Vec2& v = st.velocities[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(v.x) ||
        !std::isfinite(v.y)) {
      throw SimulationDiverged("non-finite state at mass " +
                               std::to_string(i) + ", t=" +
                               format_double(st.t));
    }
  }
}

}  // namespace detail

// Advances one semi-implicit Euler step: accumulate forces (spring elastic +
// axial damping, gravity, ground/ceiling penalty, Coulomb-capped friction),
// then v += f/m*dt, p += v*dt. Throws SimulationDiverged if the state leaves
// the finite range.
inline void step(MassSpringSystem& sys, SimState& st,
                 std::span<const double> actuation, const SimParams& params,
                 const Terrain& terrain) {
  apply_actuation(sys, actuation);

  const size_t n = sys.masses.size();
  static thread_local std::vector<Vec2> forces;
  forces.assign(n, Vec2{});

  // gravity
  for (size_t i = 0; i < n; ++i) {
    forces[i].y -= sys.masses[i].mass * params.gravity;
  }

  // springs: Hookean elastic + damping projected on the spring axis.
  // Endpoint forces are computed once and negated so the pair cancels
  // exactly.
  for (const Spring& s : sys.springs) {
    Vec2 d = st.positions[s.b] - st.positions[s.a];
    double len = d.norm();
    if (len <= 1e-12) continue;  // degenerate; no defined axis
    Vec2 u = d / len;
    double elastic = -s.k_effective * (len - s.rest_length);
    Vec2 v_rel = st.velocities[s.b] - st.velocities[s.a];
    double damping = -params.spring_damping * v_rel.dot(u);
    Vec2 f_b = u * (elastic + damping);
    forces[s.b] += f_b;
    forces[s.a] -= f_b;
  }

  // contact: penalty normal force plus friction capped at mu*|N| and at the
  // force that would cancel the tangential motion within this step.
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = st.positions[i];
    const Vec2& vel = st.velocities[i];
    double normal_mag = 0.0;

    double pen = terrain.ground(p.x) - p.y;
    st.contact[i] = 0;
    if (pen > 0.0) {
      double k = params.contact_stiffness * terrain.stiffness_scale(p.x);
      double nf = k * pen - params.contact_damping * vel.y;
      if (nf > 0.0) {
        forces[i].y += nf;
        normal_mag += nf;
      }
      st.contact[i] = 1;
    }
    double ceil_h = terrain.ceiling_at(p.x);
    double cpen = p.y - ceil_h;
    if (cpen > 0.0) {
      double nf = params.contact_stiffness * cpen +
                  params.contact_damping * vel.y;
      if (nf > 0.0) {
        forces[i].y -= nf;
        normal_mag += nf;
      }
      st.contact[i] = 1;
    }
    if (normal_mag > 0.0) {
      double m = sys.masses[i].mass;
      double stop = -(m * vel.x / params.dt + forces[i].x);
      double cap = params.friction_coefficient * normal_mag;
      forces[i].x += std::min(cap, std::max(-cap, stop));
    }
  }

  // semi-implicit Euler
  for (size_t i = 0; i < n; ++i) {
    if (sys.masses[i].fixed) {
      st.velocities[i] = Vec2{};
      continue;
    }
    st.velocities[i] += forces[i] * (params.dt / sys.masses[i].mass);
    st.positions[i] += st.velocities[i] * params.dt;
  }
  st.t += params.dt;
  st.step_count += 1;

  detail::check_finite(st);
}

// Flat-ground overload at params.ground_height.
inline void step(MassSpringSystem& sys, SimState& st,
                 std::span<const double> actuation, const SimParams& params) {
  Terrain flat;
  flat.flat_height = params.ground_height;
  step(sys, st, actuation, params, flat);
}

// ---------------------------------------------------------------------------
// settling

struct SettleResult {
  SimState state;
  bool converged = false;
  long steps = 0;
};

// Runs the damped dynamics with neutral actuation until every mass is slower
// than `velocity_tolerance` (m/s), or max_steps elapse. The check happens
// after each step, so a body released from rest still settles under the
// forces acting on it.
inline SettleResult settle(MassSpringSystem& sys, SimState state,
                           const SimParams& params, const Terrain& terrain,
                           long max_steps, double velocity_tolerance) {
  if (!(params.spring_damping > 0.0)) {
    throw std::invalid_argument("settle requires spring_damping > 0");
  }
  std::vector<double> neutral(sys.actuators.size(), 1.0);
  SettleResult res;
  for (long k = 0; k < max_steps; ++k) {
    step(sys, state, neutral, params, terrain);
    ++res.steps;
    double vmax = 0.0;
    for (const Vec2& v : state.velocities) vmax = std::max(vmax, v.norm());
    if (vmax < velocity_tolerance) {
      res.converged = true;
      break;
    }
  }
  res.state = std::move(state);
  return res;
}

// ---------------------------------------------------------------------------
// diagnostics

inline Vec2 total_momentum(const MassSpringSystem& sys, const SimState& st) {
  Vec2 p;
  for (size_t i = 0; i < sys.masses.size(); ++i)
    p += st.velocities[i] * sys.masses[i].mass;
  return p;
}

inline double kinetic_energy(const MassSpringSystem& sys,
                             const SimState& st) {
  double e = 0.0;
  for (size_t i = 0; i < sys.masses.size(); ++i)
    e += 0.5 * sys.masses[i].mass * st.velocities[i].dot(st.velocities[i]);
  return e;
}

inline double elastic_energy(const MassSpringSystem& sys,
                             const SimState& st) {
  double e = 0.0;
  for (const Spring& s : sys.springs) {
    double len = (st.positions[s.b] - st.positions[s.a]).norm();
    double stretch = len - s.rest_length;
    e += 0.5 * s.k_effective * stretch * stretch;
  }
  return e;
}

inline Vec2 center_of_mass(const MassSpringSystem& sys, const SimState& st) {
  Vec2 c;
  double total = 0.0;
  for (size_t i = 0; i < sys.masses.size(); ++i) {
    c += st.positions[i] * sys.masses[i].mass;
    total += sys.masses[i].mass;
  }
  return c / total;
}

// Signed area of the deformed body: per-voxel quad shoelace areas summed,
// which equals the boundary-polygon area because shared edges cancel.
inline double body_area(const MassSpringSystem& sys, const SimState& st) {
  double area = 0.0;
  for (const VoxelRef& v : sys.voxels) {
    // ccw: bl, br, tr, tl
    const Vec2& a = st.positions[v.corner[0]];
    const Vec2& b = st.positions[v.corner[1]];
    const Vec2& c = st.positions[v.corner[3]];
    const Vec2& d = st.positions[v.corner[2]];
    area += 0.5 * ((a.x * b.y - b.x * a.y) + (b.x * c.y - c.x * b.y) +
                   (c.x * d.y - d.x * c.y) + (d.x * a.y - a.x * d.y));
  }
  return area;
}

// ---------------------------------------------------------------------------
// trajectory dump
//
// CSV, one line per (recorded step, mass): t,mass_index,x,y,vx,vy.
// Stiffness snapshots go to a parallel CSV: t,voxel_i,voxel_j,factor.

inline void write_trajectory_header(std::ostream& out) {
  out << "t,mass_index,x,y,vx,vy\n";
}

inline void write_trajectory_record(std::ostream& out, const SimState& st) {
  for (size_t i = 0; i < st.positions.size(); ++i) {
    out << format_double(st.t) << ',' << i << ','
        << format_double(st.positions[i].x) << ','
        << format_double(st.positions[i].y) << ','
        << format_double(st.velocities[i].x) << ','
        << format_double(st.velocities[i].y) << '\n';
  }
}

inline void write_stiffness_header(std::ostream& out) {
  out << "t,voxel_i,voxel_j,factor\n";
}

inline void write_stiffness_record(std::ostream& out,
                                   const MassSpringSystem& sys, double t) {
  for (const VoxelRef& v : sys.voxels) {
    out << format_double(t) << ',' << v.i << ',' << v.j << ','
        << format_double(v.factor) << '\n';
  }
}

}  // namespace voxelsoft
