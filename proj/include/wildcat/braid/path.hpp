#pragma once

// Admissible deformations of one marked point's irregular type: a sampled
// path of coefficient data along which every root keeps its pole degree, so
// the singular directions move continuously and can be matched step by step.
// Paths arrive either as explicit sample lists or as the parametric winding
// family; before any event detection they are refined until no direction
// moves more than pi/(8 k_max) per step.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wildcat/irregular/directions.hpp"
#include "wildcat/wild/curve.hpp"

namespace wildcat::braid {

using irr::IrregularType;
using wild::IrregularCurve;

// Raised when sampling is too coarse to resolve what the directions do, or
// when a direction grazes a wall without crossing. The fix is on the caller:
// add samples or perturb the path.
struct RefinePathError : std::runtime_error {
  explicit RefinePathError(const std::string& msg)
      : std::runtime_error("refine path: " + msg) {}
};

inline double wrap_pm_pi(double a) { return std::remainder(a, 2.0 * M_PI); }

struct DeformationPath {
  int point = 0;                       // marked point being deformed
  std::vector<IrregularType> samples;  // types at increasing times
  std::vector<double> times;           // empty means uniform on [0, 1]
};

inline std::vector<double> path_times(const DeformationPath& path) {
  if (!path.times.empty()) return path.times;
  const int count = static_cast<int>(path.samples.size());
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i) ts[i] = (count == 1) ? 0.0 : double(i) / (count - 1);
  return ts;
}

struct PathCheck {
  bool valid = true;
  std::string violation;  // empty when valid
};

// Beyond this leading-argument jump between consecutive samples the branch
// matching is ambiguous; the path has to carry more samples instead.
constexpr double kMaxArgJump = 7.0 * M_PI / 8.0;

inline PathCheck validate_path(const IrregularCurve& curve, const DeformationPath& path) {
  auto fail = [](std::string why) { return PathCheck{false, std::move(why)}; };
  wild::validate(curve);
  if (path.point < 0 || path.point >= curve.marked_count())
    return fail("marked point index out of range");
  if (path.samples.empty()) return fail("path has no samples");
  if (!path.times.empty()) {
    if (path.times.size() != path.samples.size())
      return fail("times and samples have different lengths");
    for (size_t i = 0; i + 1 < path.times.size(); ++i)
      if (!(path.times[i] < path.times[i + 1]))
        return fail("times must be strictly increasing");
  }
  for (size_t i = 0; i < path.samples.size(); ++i) {
    try {
      irr::validate(path.samples[i]);
    } catch (const std::exception& e) {
      return fail("sample " + std::to_string(i) + ": " + e.what());
    }
    if (path.samples[i].n != curve.n())
      return fail("sample " + std::to_string(i) + ": rank differs from the curve");
  }

  // the path must start on the curve's own type
  const IrregularType& base = curve.types[path.point];
  const IrregularType& s0 = path.samples.front();
  if (s0.ks != base.ks) return fail("first sample carries different pole levels than the curve");
  for (int t = 0; t < base.levels(); ++t)
    if ((s0.As[t] - base.As[t]).cwiseAbs().maxCoeff() > 1e-9)
      return fail("first sample does not match the marked point's type");

  for (size_t i = 0; i + 1 < path.samples.size(); ++i) {
    const auto& a = path.samples[i];
    const auto& b = path.samples[i + 1];
    if (a.ks != b.ks)
      return fail("pole levels change between samples " + std::to_string(i) + " and " +
                  std::to_string(i + 1));
    if (!irr::same_pole_degrees(a, b))
      return fail("pole degree of a root changes between samples " + std::to_string(i) +
                  " and " + std::to_string(i + 1));
    for (auto root : lie::all_roots(a.n)) {
      auto ta = irr::q_alpha(a, root);
      if (ta.degree == 0) continue;
      auto tb = irr::q_alpha(b, root);
      double jump = std::abs(wrap_pm_pi(std::arg(tb.leading) - std::arg(ta.leading)));
      if (jump >= kMaxArgJump)
        return fail("leading argument of a root jumps too far between samples " +
                    std::to_string(i) + " and " + std::to_string(i + 1) + "; add samples");
    }
  }
  return {};
}

struct RefinedPath {
  int point = 0;
  std::vector<double> times;
  std::vector<IrregularType> samples;
};

inline IrregularType blend_types(const IrregularType& a, const IrregularType& b, double s) {
  IrregularType out = a;
  for (int t = 0; t < a.levels(); ++t) out.As[t] = (1.0 - s) * a.As[t] + s * b.As[t];
  return out;
}

inline int max_pole_degree(const IrregularType& q) {
  int k = 1;
  for (auto root : lie::all_roots(q.n)) k = std::max(k, irr::q_alpha(q, root).degree);
  return k;
}

// Worst direction motion between two admissible samples: a root of degree k
// spreads its k rays by (change of leading argument)/k each.
inline double direction_motion(const IrregularType& a, const IrregularType& b) {
  double worst = 0.0;
  for (auto root : lie::all_roots(a.n)) {
    auto ta = irr::q_alpha(a, root);
    if (ta.degree == 0) continue;
    auto tb = irr::q_alpha(b, root);
    double jump = std::abs(wrap_pm_pi(std::arg(tb.leading) - std::arg(ta.leading)));
    worst = std::max(worst, jump / ta.degree);
  }
  return worst;
}

// Bisects steps until every ray moves less than pi/(8 k_max) per step.
// Linear interpolation of the coefficient data defines the in-between types;
// a pole degree dropping at an inserted midpoint exposes an inadmissible
// path that the raw samples happened to straddle.
inline RefinedPath refine_path(const IrregularCurve& curve, const DeformationPath& path) {
  auto check = validate_path(curve, path);
  if (!check.valid) throw std::invalid_argument("invalid deformation path: " + check.violation);
  RefinedPath out;
  out.point = path.point;
  out.times = path_times(path);
  out.samples = path.samples;
  const double bound = M_PI / (8.0 * max_pole_degree(out.samples.front()));
  for (int round = 0; round < 26; ++round) {
    bool split_any = false;
    std::vector<double> ts;
    std::vector<IrregularType> qs;
    for (size_t i = 0; i + 1 < out.samples.size(); ++i) {
      ts.push_back(out.times[i]);
      qs.push_back(out.samples[i]);
      if (direction_motion(out.samples[i], out.samples[i + 1]) >= bound) {
        IrregularType mid = blend_types(out.samples[i], out.samples[i + 1], 0.5);
        if (!irr::same_pole_degrees(mid, out.samples[i]))
          throw std::invalid_argument(
              "invalid deformation path: pole degree drops between samples " +
              std::to_string(i) + " and " + std::to_string(i + 1));
        ts.push_back(0.5 * (out.times[i] + out.times[i + 1]));
        qs.push_back(std::move(mid));
        split_any = true;
      }
    }
    ts.push_back(out.times.back());
    qs.push_back(out.samples.back());
    out.times = std::move(ts);
    out.samples = std::move(qs);
    if (!split_any) return out;
    if (out.samples.size() > 200000) break;
  }
  throw RefinePathError("direction motion does not settle under refinement");
}

// Winding family: entries i and j of every coefficient level rotate rigidly
// about their midpoint, a_i(t) = mu + delta e^{-2 pi i w t}. Positive turns
// wind clockwise, so one full turn carries each of the pair's rays across a
// generic cut once.
inline DeformationPath wind_path(const IrregularCurve& curve, int point, int i, int j,
                                 double turns, int samples = 0) {
  wild::validate(curve);
  if (point < 0 || point >= curve.marked_count())
    throw std::invalid_argument("wind path: marked point index out of range");
  const IrregularType& base = curve.types[point];
  if (i < 0 || j < 0 || i >= base.n || j >= base.n || i == j)
    throw std::invalid_argument("wind path: bad entry pair");
  if (samples <= 1)
    samples = std::max(17, static_cast<int>(std::ceil(std::abs(turns) * 32.0)) + 1);
  DeformationPath path;
  path.point = point;
  for (int s = 0; s < samples; ++s) {
    double t = double(s) / (samples - 1);
    IrregularType q = base;
    Cx rot = std::exp(Cx(0.0, -2.0 * M_PI * turns * t));
    for (int lev = 0; lev < q.levels(); ++lev) {
      Cx mu = 0.5 * (base.As[lev](i) + base.As[lev](j));
      Cx de = 0.5 * (base.As[lev](i) - base.As[lev](j));
      q.As[lev](i) = mu + de * rot;
      q.As[lev](j) = mu - de * rot;
    }
    path.samples.push_back(std::move(q));
  }
  return path;
}

// ---- JSON ----------------------------------------------------------------
// Explicit form:   {"point": 0, "samples": [type, ...], "times": [...]}
// Parametric form: {"kind": "wind", "point": 0, "pair": [i, j], "turns": 1,
//                   "samples": 33}

inline DeformationPath path_from_json(const nlohmann::json& j, const IrregularCurve& curve) {
  if (!j.is_object()) throw std::invalid_argument("path json: expected an object");
  if (j.contains("kind")) {
    for (const auto& item : j.items())
      if (item.key() != "kind" && item.key() != "point" && item.key() != "pair" &&
          item.key() != "turns" && item.key() != "samples")
        throw std::invalid_argument("path json: unknown key '" + item.key() + "'");
    std::string kind = j.at("kind").get<std::string>();
    if (kind != "wind") throw std::invalid_argument("path json: unknown kind '" + kind + "'");
    if (!j.contains("pair") || !j.at("pair").is_array() || j.at("pair").size() != 2)
      throw std::invalid_argument("path json: 'pair' must be [i, j]");
    if (!j.contains("turns") || !j.at("turns").is_number())
      throw std::invalid_argument("path json: 'turns' must be a number");
    return wind_path(curve, j.value("point", 0), j.at("pair")[0].get<int>(),
                     j.at("pair")[1].get<int>(), j.at("turns").get<double>(),
                     j.value("samples", 0));
  }
  for (const auto& item : j.items())
    if (item.key() != "point" && item.key() != "samples" && item.key() != "times")
      throw std::invalid_argument("path json: unknown key '" + item.key() + "'");
  if (!j.contains("samples") || !j.at("samples").is_array() || j.at("samples").empty())
    throw std::invalid_argument("path json: 'samples' must be a non-empty array");
  DeformationPath path;
  path.point = j.value("point", 0);
  for (const auto& s : j.at("samples")) path.samples.push_back(irr::irregular_from_json(s));
  if (j.contains("times")) {
    if (!j.at("times").is_array())
      throw std::invalid_argument("path json: 'times' must be an array");
    for (const auto& t : j.at("times")) path.times.push_back(t.get<double>());
  }
  return path;
}

inline nlohmann::json path_to_json(const DeformationPath& path) {
  nlohmann::json j;
  j["point"] = path.point;
  j["samples"] = nlohmann::json::array();
  for (const auto& q : path.samples) j["samples"].push_back(irr::irregular_to_json(q));
  if (!path.times.empty()) j["times"] = path.times;
  return j;
}

}  // namespace wildcat::braid
