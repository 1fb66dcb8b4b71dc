#pragma once

// A curve with marked points, each carrying an irregular class, plus the
// optional conjugacy-class data used for moment-map fibers. The curve fixes
// the combinatorics: every marked point gets its singular-direction
// structure, its stabilizer group H_i, and its Stokes patterns.

#include <optional>

#include "wildcat/irregular/directions.hpp"
#include "wildcat/qh/builders.hpp"

namespace wildcat::wild {

using irr::IrregularType;
using lie::Partition;
using irr::StokesStructure;

struct IrregularCurve {
  int genus = 0;
  std::vector<IrregularType> types;
  std::vector<std::optional<double>> cuts;  // per point; empty means defaults

  int marked_count() const { return static_cast<int>(types.size()); }
  int n() const { return types.empty() ? 0 : types[0].n; }
};

inline void validate(const IrregularCurve& curve) {
  if (curve.genus < 0) throw std::invalid_argument("curve: genus must be >= 0");
  if (curve.types.empty())
    throw std::invalid_argument("curve: at least one marked point required");
  for (const auto& q : curve.types) {
    irr::validate(q);
    if (q.n != curve.n())
      throw std::invalid_argument("curve: all marked points must share the group");
  }
  if (!curve.cuts.empty() && curve.cuts.size() != curve.types.size())
    throw std::invalid_argument("curve: cuts list length mismatch");
}

inline StokesStructure structure_at(const IrregularCurve& curve, int i) {
  std::optional<double> cut;
  if (!curve.cuts.empty()) cut = curve.cuts[i];
  return irr::singular_directions(curve.types[i], cut);
}

// The exceptional configurations where the trivially-acting subgroup of the
// symmetry group exceeds the center; stability claims are not made there.
inline bool is_exceptional(const IrregularCurve& curve) {
  return curve.genus == 0 && curve.marked_count() == 1 &&
         curve.types[0].max_order() <= 1;
}

// Semisimple-plus-unipotent class data for the formal monodromy at one
// marked point: n eigenvalues listed by diagonal position (grouping by the
// blocks of H_i), and optionally a regular unipotent part within each
// equal-eigenvalue run.
struct ClassSpec {
  std::vector<Cx> eigenvalues;
  bool regular_unipotent = false;
};

using ClassList = std::vector<std::optional<ClassSpec>>;

inline void validate_classes(const IrregularCurve& curve, const ClassList& classes) {
  if (classes.size() != curve.types.size())
    throw std::invalid_argument("classes: one entry per marked point required");
  for (const auto& c : classes)
    if (c && static_cast<int>(c->eigenvalues.size()) != curve.n())
      throw std::invalid_argument("classes: eigenvalue count must equal n");
}

// ---- JSON ------------------------------------------------------------------
// {"genus": 0, "points": [irregular type...],
//  "classes": [{"eigenvalues": [[re,im]...], "unipotent": "trivial"}, null, ...],
//  "cuts": [0.5, null, ...]}

inline IrregularCurve curve_from_json(const nlohmann::json& j) {
  IrregularCurve curve;
  if (j.contains("genus")) curve.genus = j.at("genus").get<int>();
  if (!j.contains("points"))
    throw std::invalid_argument("curve: missing field \"points\"");
  for (const auto& p : j.at("points"))
    curve.types.push_back(irr::irregular_from_json(p));
  if (j.contains("cuts")) {
    for (const auto& c : j.at("cuts")) {
      if (c.is_null())
        curve.cuts.push_back(std::nullopt);
      else
        curve.cuts.push_back(c.get<double>());
    }
  }
  validate(curve);
  return curve;
}

inline ClassList classes_from_json(const nlohmann::json& j, const IrregularCurve& curve) {
  ClassList classes(curve.types.size());
  if (!j.contains("classes")) return classes;
  const auto& arr = j.at("classes");
  if (arr.size() != curve.types.size())
    throw std::invalid_argument("classes: one entry per marked point required");
  for (size_t i = 0; i < arr.size(); ++i) {
    if (arr[i].is_null()) continue;
    ClassSpec spec;
    for (const auto& e : arr[i].at("eigenvalues"))
      spec.eigenvalues.push_back(irr::cx_from_json(e, "\"eigenvalues\""));
    if (arr[i].contains("unipotent")) {
      std::string u = arr[i].at("unipotent").get<std::string>();
      if (u == "regular")
        spec.regular_unipotent = true;
      else if (u != "trivial")
        throw std::invalid_argument("classes: unipotent must be \"trivial\" or \"regular\"");
    }
    classes[i] = std::move(spec);
  }
  validate_classes(curve, classes);
  return classes;
}

}  // namespace wildcat::wild
