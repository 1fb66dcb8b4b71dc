#pragma once

// Named catalogue of the spaces the verification tooling runs over: the
// doubles, a regular semisimple conjugacy class, the internally fused double,
// fission spaces over the standard gradings, the rectangular pair spaces, and
// the two-level rank-three Stokes space.

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildcat/irregular/directions.hpp"
#include "wildcat/qh/builders.hpp"

namespace wildcat::qh {

namespace detail {

inline Mat regular_diag3() {
  Mat r = Mat::Zero(3, 3);
  r(0, 0) = Cx(1.3, 0.0);
  r(1, 1) = Cx(0.4, 0.9);
  r(2, 2) = Cx(-0.5, 1.2);
  return r;
}

inline irr::IrregularType two_level_rank3() {
  return irr::make_irregular(3, {{2, {Cx(1), Cx(1), Cx(-2)}}, {1, {Cx(0), Cx(1), Cx(3)}}});
}

}  // namespace detail

inline const std::map<std::string, std::function<SpacePtr()>>& space_menu() {
  static const std::map<std::string, std::function<SpacePtr()>> menu = {
      {"double2", [] { return SpacePtr(make_double(2)); }},
      {"double3", [] { return SpacePtr(make_double(3)); }},
      {"class3",
       [] { return SpacePtr(std::make_shared<ConjugacyClassSpace>(detail::regular_diag3())); }},
      {"fused-double3", [] { return SpacePtr(std::make_shared<FusedDoubleSpace>(3)); }},
      {"fission-1-1-r1", [] { return SpacePtr(make_fission(2, {{0}, {1}}, 1)); }},
      {"fission-1-1-r2", [] { return SpacePtr(make_fission(2, {{0}, {1}}, 2)); }},
      {"fission-1-1-r3", [] { return SpacePtr(make_fission(2, {{0}, {1}}, 3)); }},
      {"fission-2-1-r1", [] { return SpacePtr(make_fission(3, {{0, 1}, {2}}, 1)); }},
      {"fission-2-1-r2", [] { return SpacePtr(make_fission(3, {{0, 1}, {2}}, 2)); }},
      {"fission-2-1-r3", [] { return SpacePtr(make_fission(3, {{0, 1}, {2}}, 3)); }},
      {"pair-1-1", [] { return SpacePtr(std::make_shared<PairSpace>(1, 1)); }},
      {"pair-2-1", [] { return SpacePtr(std::make_shared<PairSpace>(2, 1)); }},
      {"pair-2-2", [] { return SpacePtr(std::make_shared<PairSpace>(2, 2)); }},
      {"stokes-two-level",
       [] {
         return SpacePtr(
             make_stokes_space(irr::singular_directions(detail::two_level_rank3())));
       }},
  };
  return menu;
}

inline SpacePtr named_space(const std::string& name) {
  const auto& menu = space_menu();
  auto it = menu.find(name);
  if (it == menu.end()) {
    std::string known;
    for (const auto& [k, v] : menu) known += (known.empty() ? "" : ", ") + k;
    throw std::invalid_argument("unknown space \"" + name + "\" (choose from: " + known +
                                ", or \"all\")");
  }
  return it->second();
}

inline std::vector<std::string> all_space_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : space_menu()) names.push_back(k);
  return names;
}

}  // namespace wildcat::qh
