#pragma once

// Wall events along an admissible deformation. Each singular ray is tracked
// by (root, branch) with a continuous leading argument, so its angle is a
// continuous function of time with no branch jumps. After refinement every
// ray moves less than pi/(8 k_max) per step, which makes the two wall types
// readable from wrapped angle differences at consecutive samples: a sign
// change against the cut is a CutCrossing, a sign change between two ray
// groups is a Collision. Tangential contact, dwelling on a wall, and
// anything the sampling cannot resolve are refused rather than guessed.

#include <map>
#include <set>

#include "wildcat/braid/path.hpp"

namespace wildcat::braid {

using lie::Root;
using lie::UnipotentPattern;

struct WallEvent {
  enum class Kind { CutCrossing, Collision };
  Kind kind = Kind::CutCrossing;
  double time = 0.0;
  int point = 0;
  double angle = 0.0;  // position on the circle, in [0, 2 pi)
  int sense = 0;       // crossings: +1 clockwise through the cut, -1 the other way
  int first_slot = 0;  // lowest 0-based slot touched at event time
  std::vector<UnipotentPattern> old_order;  // touched slots just before
  std::vector<UnipotentPattern> new_order;  // touched slots just after
};

struct PathAnalysis {
  double cut = 0.0;
  RefinedPath refined;
  std::vector<WallEvent> events;  // ordered by (time, angle)
  std::vector<UnipotentPattern> initial_slots;
  std::vector<UnipotentPattern> final_slots;
};

namespace detail {

constexpr double kContactTol = irr::kDirectionMergeTol;

struct RayTrack {
  Root root;
  int branch = 0;
  int degree = 1;
  std::vector<double> angle;  // continuous in t, one entry per refined sample
};

inline std::vector<RayTrack> track_rays(const RefinedPath& rp) {
  std::vector<RayTrack> rays;
  const int n = rp.samples.front().n;
  const int count = static_cast<int>(rp.samples.size());
  for (auto root : lie::all_roots(n)) {
    auto t0 = irr::q_alpha(rp.samples.front(), root);
    if (t0.degree == 0) continue;
    std::vector<double> arg(count);
    arg[0] = std::arg(t0.leading);
    double prev = arg[0];
    for (int i = 1; i < count; ++i) {
      auto ti = irr::q_alpha(rp.samples[i], root);
      double cur = std::arg(ti.leading);
      arg[i] = arg[i - 1] + wrap_pm_pi(cur - prev);
      prev = cur;
    }
    for (int b = 0; b < t0.degree; ++b) {
      RayTrack ray;
      ray.root = root;
      ray.branch = b;
      ray.degree = t0.degree;
      ray.angle.resize(count);
      for (int i = 0; i < count; ++i)
        ray.angle[i] = (arg[i] - M_PI + 2.0 * M_PI * b) / t0.degree;
      rays.push_back(std::move(ray));
    }
  }
  return rays;
}

// Continuous angle of one ray at the midpoint of a refined step.
inline double ray_angle_mid(const RefinedPath& rp, const RayTrack& ray, int step) {
  IrregularType mid = blend_types(rp.samples[step], rp.samples[step + 1], 0.5);
  auto tm = irr::q_alpha(mid, ray.root);
  auto ti = irr::q_alpha(rp.samples[step], ray.root);
  double darg = wrap_pm_pi(std::arg(tm.leading) - std::arg(ti.leading));
  return ray.angle[step] + darg / ray.degree;
}

// One transversal wall contact, read off a pair of angle tracks.
struct RawCross {
  double time = 0.0;
  double angle = 0.0;  // continuous angle of the first participant
  int before = 0;      // refined sample just before the contact
  int after = 0;       // refined sample just after
  int a = 0;           // ray id
  int b = -1;          // second ray id, or -1 for the cut
  int sense = 0;       // cut crossings only
};

// Coincident ray group dissolving right at the start or forming at the end.
struct BoundaryContact {
  bool at_start = true;
  int a = 0;
  int b = 0;
};

struct PairScan {
  std::vector<RawCross> crossings;
  std::vector<BoundaryContact> boundary;
};

// Difference analysis for one pair of angle tracks. `db` is the second
// track; for the cut it is constant. Appends crossing and boundary records
// and refuses tangential or unresolved contact.
inline void scan_pair(const RefinedPath& rp, const std::vector<RayTrack>& rays, int ia, int ib,
                      const std::vector<double>& da, const std::vector<double>& db,
                      bool is_cut, double graze_window, PairScan& out) {
  const int count = static_cast<int>(da.size());
  std::vector<double> diff(count);
  std::vector<char> contact(count);
  bool all_contact = true;
  for (int i = 0; i < count; ++i) {
    diff[i] = wrap_pm_pi(da[i] - db[i]);
    contact[i] = std::abs(diff[i]) <= kContactTol;
    all_contact = all_contact && contact[i];
  }
  if (all_contact) {
    if (is_cut)
      throw std::invalid_argument("deformation path: a singular direction rides the cut");
    return;  // permanent companions share a slot throughout; nothing happens
  }

  auto describe = [&](int i) {
    return " near t = " + std::to_string(rp.times[i]);
  };

  // contact runs
  for (int i = 0; i < count;) {
    if (!contact[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < count && contact[j + 1]) ++j;
    if (i == 0 && j == count - 1) break;  // handled above
    if (i == 0) {
      if (is_cut)
        throw std::invalid_argument("deformation path: starts with a direction on the cut");
      if (j > 0) throw RefinePathError("path dwells on a wall" + describe(j));
      out.boundary.push_back({true, ia, ib});
    } else if (j == count - 1) {
      if (is_cut)
        throw std::invalid_argument("deformation path: ends with a direction on the cut");
      if (j > i) throw RefinePathError("path dwells on a wall" + describe(i));
      out.boundary.push_back({false, ia, ib});
    } else if (j > i) {
      throw RefinePathError("path dwells on a wall" + describe(i));
    } else {
      // single interior contact sample: transversal if the signs flip
      double before = diff[i - 1];
      double after = diff[i + 1];
      if (before * after < 0.0) {
        RawCross c;
        c.time = rp.times[i];
        c.angle = da[i];
        c.before = i - 1;
        c.after = i + 1;
        c.a = ia;
        c.b = ib;
        c.sense = before > 0.0 ? +1 : -1;
        out.crossings.push_back(c);
      } else {
        throw RefinePathError("tangential wall contact" + describe(i));
      }
    }
    i = j + 1;
  }

  // sign flips and grazes between clean samples
  for (int i = 0; i + 1 < count; ++i) {
    if (contact[i] || contact[i + 1]) continue;
    double d0 = diff[i];
    double d1 = diff[i + 1];
    if (d0 * d1 < 0.0) {
      if (std::abs(d0) > 0.5 * M_PI || std::abs(d1) > 0.5 * M_PI) continue;  // antipodal wrap
      double s = d0 / (d0 - d1);
      RawCross c;
      c.time = rp.times[i] + s * (rp.times[i + 1] - rp.times[i]);
      c.angle = da[i] + s * (da[i + 1] - da[i]);
      c.before = i;
      c.after = i + 1;
      c.a = ia;
      c.b = ib;
      c.sense = d0 > 0.0 ? +1 : -1;
      out.crossings.push_back(c);
      continue;
    }
    if (std::min(std::abs(d0), std::abs(d1)) < graze_window) {
      double am = ray_angle_mid(rp, rays[ia], i);
      double bm = is_cut ? db[i] : ray_angle_mid(rp, rays[ib], i);
      double dm = wrap_pm_pi(am - bm);
      if (std::abs(dm) <= kContactTol)
        throw RefinePathError("tangential wall contact" + describe(i));
      if (dm * d0 < 0.0)
        throw RefinePathError("two wall contacts inside one step" + describe(i));
    }
  }
}

struct Cluster {
  std::vector<int> rays;
  UnipotentPattern pat;
};

inline UnipotentPattern cluster_pattern(int n, const std::vector<RayTrack>& rays,
                                        const std::vector<int>& ids) {
  UnipotentPattern p;
  p.n = n;
  for (int id : ids) p.roots.insert(rays[id].root);
  return p;
}

// Groups ray ids by angle at one sample, each group sorted and the list
// ordered by angle measured positively from the cut.
inline std::vector<std::vector<int>> group_by_angle(const std::vector<RayTrack>& rays,
                                                    const std::vector<int>& ids, int sample,
                                                    double cut) {
  std::vector<int> order = ids;
  auto from_cut = [&](int id) {
    double fc = irr::mod_2pi(rays[id].angle[sample] - cut);
    return fc == 0.0 ? 2.0 * M_PI : fc;
  };
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return from_cut(x) < from_cut(y); });
  std::vector<std::vector<int>> groups;
  for (int id : order) {
    if (!groups.empty()) {
      int last = groups.back().back();
      double gap = std::abs(wrap_pm_pi(rays[id].angle[sample] - rays[last].angle[sample]));
      if (gap <= kContactTol) {
        groups.back().push_back(id);
        continue;
      }
    }
    groups.push_back({id});
  }
  // seam: first and last group may be the same direction across the cut
  if (groups.size() > 1) {
    double gap = std::abs(wrap_pm_pi(rays[groups.front().front()].angle[sample] -
                                     rays[groups.back().back()].angle[sample]));
    if (gap <= kContactTol) {
      groups.back().insert(groups.back().end(), groups.front().begin(), groups.front().end());
      groups.erase(groups.begin());
    }
  }
  return groups;
}

}  // namespace detail

// Full event analysis of a deformation path: refines, tracks every ray,
// reads off the wall events, and replays them through the slot order so each
// event knows which consecutive factors it touches.
inline PathAnalysis analyze(const IrregularCurve& curve, const DeformationPath& path) {
  using detail::Cluster;
  using detail::RawCross;
  using detail::RayTrack;

  PathAnalysis an;
  an.refined = refine_path(curve, path);
  const RefinedPath& rp = an.refined;
  const int n = curve.n();
  const int count = static_cast<int>(rp.samples.size());

  irr::StokesStructure st0 = wild::structure_at(curve, path.point);
  an.cut = st0.cut;

  std::vector<RayTrack> rays = detail::track_rays(rp);
  const int nrays = static_cast<int>(rays.size());
  const double graze_window = M_PI / (4.0 * max_pole_degree(rp.samples.front()));

  // pair scans: every ray against every later ray, and against the cut
  detail::PairScan scan;
  std::vector<double> cut_track(count, an.cut);
  for (int a = 0; a < nrays; ++a) {
    detail::scan_pair(rp, rays, a, -1, rays[a].angle, cut_track, true, graze_window, scan);
    for (int b = a + 1; b < nrays; ++b)
      detail::scan_pair(rp, rays, a, b, rays[a].angle, rays[b].angle, false, graze_window, scan);
  }

  // initial slot clustering must reproduce the structure the chain space uses
  std::vector<int> all_ids(nrays);
  for (int i = 0; i < nrays; ++i) all_ids[i] = i;
  std::vector<Cluster> slots;
  for (auto& g : detail::group_by_angle(rays, all_ids, 0, an.cut))
    slots.push_back({g, detail::cluster_pattern(n, rays, g)});
  if (slots.size() != st0.dirs.size())
    throw std::logic_error("event analysis: direction clustering disagrees with the structure");
  for (size_t i = 0; i < slots.size(); ++i)
    if (slots[i].pat.roots != st0.dirs[i].pattern(n).roots)
      throw std::logic_error("event analysis: slot supports disagree with the structure");
  for (const auto& s : slots) an.initial_slots.push_back(s.pat);

  // assemble events: transitive grouping of simultaneous coincident records
  struct ProtoEvent {
    bool is_cut = false;
    int sense = 0;
    double time = 0.0;
    double angle = 0.0;  // representative continuous angle
    int before = 0, after = 0;
    std::set<int> rays;
  };
  std::vector<ProtoEvent> protos;
  const double tspan = rp.times.back() - rp.times.front();
  const double time_tol = 1e-7 * (tspan > 0.0 ? tspan : 1.0);
  auto same_wall = [&](const ProtoEvent& p, double t, double ang) {
    return std::abs(p.time - t) <= time_tol && std::abs(wrap_pm_pi(p.angle - ang)) <= 1e-6;
  };
  for (const auto& c : scan.crossings) {
    ProtoEvent* home = nullptr;
    for (auto& p : protos)
      if (p.is_cut == (c.b < 0) && same_wall(p, c.time, c.angle)) {
        home = &p;
        break;
      }
    if (!home) {
      protos.push_back({});
      home = &protos.back();
      home->is_cut = c.b < 0;
      home->sense = c.sense;
      home->time = c.time;
      home->angle = c.angle;
      home->before = c.before;
      home->after = c.after;
    }
    if (home->is_cut && home->sense != c.sense)
      throw RefinePathError("conflicting cut crossings at one instant");
    home->rays.insert(c.a);
    if (c.b >= 0) home->rays.insert(c.b);
    home->before = std::min(home->before, c.before);
    home->after = std::max(home->after, c.after);
  }
  for (const auto& p : protos)
    if (p.is_cut) {
      for (const auto& q : protos)
        if (!q.is_cut && std::abs(p.time - q.time) <= time_tol &&
            std::abs(wrap_pm_pi(p.angle - q.angle)) <= 1e-6)
          throw RefinePathError("directions collide on the cut");
    }

  // boundary splits and merges, one proto per coincident group
  for (bool at_start : {true, false}) {
    std::set<int> touched;
    for (const auto& bc : scan.boundary)
      if (bc.at_start == at_start) {
        touched.insert(bc.a);
        touched.insert(bc.b);
      }
    if (touched.empty()) continue;
    int sample = at_start ? 0 : count - 1;
    std::vector<int> ids(touched.begin(), touched.end());
    for (auto& g : detail::group_by_angle(rays, ids, sample, an.cut)) {
      if (g.size() < 2) continue;
      ProtoEvent p;
      p.is_cut = false;
      p.time = rp.times[sample];
      p.angle = rays[g.front()].angle[sample];
      p.before = at_start ? 0 : count - 2;
      p.after = at_start ? 1 : count - 1;
      p.rays.insert(g.begin(), g.end());
      protos.push_back(std::move(p));
    }
  }

  std::sort(protos.begin(), protos.end(), [](const ProtoEvent& x, const ProtoEvent& y) {
    if (x.time != y.time) return x.time < y.time;
    return irr::mod_2pi(x.angle) < irr::mod_2pi(y.angle);
  });

  // replay through the slot order
  auto slot_of = [&](int ray) {
    for (size_t s = 0; s < slots.size(); ++s)
      for (int id : slots[s].rays)
        if (id == ray) return static_cast<int>(s);
    throw std::logic_error("event analysis: ray missing from the slot order");
  };
  for (const auto& p : protos) {
    WallEvent ev;
    ev.time = p.time;
    ev.point = path.point;
    ev.angle = irr::mod_2pi(p.angle);
    std::set<int> touched_slots;
    for (int r : p.rays) touched_slots.insert(slot_of(r));
    int lo = *touched_slots.begin();
    int hi = *touched_slots.rbegin();
    if (static_cast<int>(touched_slots.size()) != hi - lo + 1)
      throw RefinePathError("interleaved wall events at one instant");
    if (p.is_cut) {
      if (touched_slots.size() != 1)
        throw std::logic_error("event analysis: cut crossing touches several slots");
      ev.kind = WallEvent::Kind::CutCrossing;
      ev.sense = p.sense;
      ev.old_order = {slots[lo].pat};
      ev.new_order = {slots[lo].pat};
      const int last = static_cast<int>(slots.size()) - 1;
      if (p.sense > 0) {
        if (lo != 0)
          throw std::logic_error("event analysis: clockwise cut crossing away from slot 1");
        ev.first_slot = 0;
        std::rotate(slots.begin(), slots.begin() + 1, slots.end());
      } else {
        if (lo != last)
          throw std::logic_error("event analysis: counterclockwise cut crossing away from the last slot");
        ev.first_slot = last;
        std::rotate(slots.begin(), slots.begin() + last, slots.end());
      }
    } else {
      ev.kind = WallEvent::Kind::Collision;
      ev.first_slot = lo;
      // full ray content of the touched slots, regrouped by post-event angle
      std::vector<int> members;
      for (int s = lo; s <= hi; ++s) {
        ev.old_order.push_back(slots[s].pat);
        members.insert(members.end(), slots[s].rays.begin(), slots[s].rays.end());
      }
      std::vector<Cluster> fresh;
      for (auto& g : detail::group_by_angle(rays, members, p.after, an.cut))
        fresh.push_back({g, detail::cluster_pattern(n, rays, g)});
      // order within the event arc, counterclockwise from the event angle
      std::sort(fresh.begin(), fresh.end(), [&](const Cluster& x, const Cluster& y) {
        return wrap_pm_pi(rays[x.rays.front()].angle[p.after] - p.angle) <
               wrap_pm_pi(rays[y.rays.front()].angle[p.after] - p.angle);
      });
      for (const auto& c : fresh) ev.new_order.push_back(c.pat);
      slots.erase(slots.begin() + lo, slots.begin() + hi + 1);
      slots.insert(slots.begin() + lo, fresh.begin(), fresh.end());
    }
    an.events.push_back(std::move(ev));
  }

  for (const auto& s : slots) an.final_slots.push_back(s.pat);

  // the replayed slot order must be the final type's own structure
  irr::StokesStructure stf = irr::singular_directions(rp.samples.back(), an.cut);
  if (stf.dirs.size() != slots.size())
    throw std::logic_error("event analysis: final slot count disagrees with the structure");
  for (size_t i = 0; i < slots.size(); ++i)
    if (slots[i].pat.roots != stf.dirs[i].pattern(n).roots)
      throw std::logic_error("event analysis: final slot order disagrees with the structure");

  return an;
}

inline std::vector<WallEvent> detect_events(const IrregularCurve& curve,
                                            const DeformationPath& path) {
  return analyze(curve, path).events;
}

}  // namespace wildcat::braid
