#pragma once

// Parallel transport of Stokes representations along admissible deformations.
// Each wall event acts by an explicit isomorphism of the local chain factor:
// cut crossings rotate a unipotent factor past the connection matrix, and
// collisions refactorize the touched factors across the merged unipotent
// group. The composite over a closed path is the braid-group action on the
// fibre. Invariance of the defining relation, the formal classes, the
// two-form and stability is measured, never assumed.

#include <memory>

#include "wildcat/braid/events.hpp"
#include "wildcat/morphisms/chain_maps.hpp"
#include "wildcat/wild/representation.hpp"
#include "wildcat/wild/stability.hpp"

namespace wildcat::braid {

using wild::StokesRep;

constexpr double kTransportProductTol = 1e-12;

// Positive sense, (C, h, S_1, .., S_m) -> (S_1 C, h, S_2, .., S_m, h^{-1} S_1 h);
// negative sense is the exact inverse. Both fix every monodromy on the nose.
inline StokesRep apply_cut_crossing(const StokesRep& rep, const WallEvent& ev) {
  if (ev.kind != WallEvent::Kind::CutCrossing)
    throw std::invalid_argument("apply_cut_crossing: event is not a cut crossing");
  if (ev.point < 0 || ev.point >= static_cast<int>(rep.points.size()))
    throw std::invalid_argument("apply_cut_crossing: marked point out of range");
  StokesRep out = rep;
  auto& pt = out.points[ev.point];
  if (pt.S.empty())
    throw std::invalid_argument("apply_cut_crossing: the point has no unipotent factors");
  if (ev.sense > 0) {
    Mat s0 = pt.S.front();
    pt.C = s0 * pt.C;
    pt.S.erase(pt.S.begin());
    pt.S.push_back(pt.h.inverse() * s0 * pt.h);
  } else if (ev.sense < 0) {
    Mat t = pt.h * pt.S.back() * pt.h.inverse();
    pt.C = t.inverse() * pt.C;
    pt.S.pop_back();
    pt.S.insert(pt.S.begin(), t);
  } else {
    throw std::invalid_argument("apply_cut_crossing: sense must be +1 or -1");
  }
  return out;
}

// Refactorizes the touched consecutive factors across the post-event slot
// patterns. The slot product is preserved exactly, so every monodromy and
// the moment data survive; the factorization is the unique direct-spanning
// one, and it fails loudly when the merged support is not closed, which
// signals corrupted event data or an undetected tangential event.
inline StokesRep apply_collision(const StokesRep& rep, const WallEvent& ev) {
  if (ev.kind != WallEvent::Kind::Collision)
    throw std::invalid_argument("apply_collision: event is not a collision");
  if (ev.point < 0 || ev.point >= static_cast<int>(rep.points.size()))
    throw std::invalid_argument("apply_collision: marked point out of range");
  StokesRep out = rep;
  auto& pt = out.points[ev.point];
  const int m = static_cast<int>(pt.S.size());
  const int count = static_cast<int>(ev.old_order.size());
  if (count < 1 || ev.first_slot < 0 || ev.first_slot + count > m)
    throw std::invalid_argument("apply_collision: slot range out of bounds");
  if (ev.new_order.empty()) throw std::invalid_argument("apply_collision: empty new order");

  Mat prod = pt.S[ev.first_slot + count - 1];
  for (int i = ev.first_slot + count - 2; i >= ev.first_slot; --i) prod = prod * pt.S[i];

  std::vector<UnipotentPattern> mult(ev.new_order.rbegin(), ev.new_order.rend());
  std::vector<Mat> fs;
  try {
    fs = lie::direct_span_factorize(prod, mult);
  } catch (const std::exception& e) {
    throw std::runtime_error(
        std::string("collision refactorization failed (non-closed merge or tangential event): ") +
        e.what());
  }

  const int k = static_cast<int>(fs.size());
  std::vector<Mat> S2(pt.S.begin(), pt.S.begin() + ev.first_slot);
  for (int j = 0; j < k; ++j) S2.push_back(fs[k - 1 - j]);
  S2.insert(S2.end(), pt.S.begin() + ev.first_slot + count, pt.S.end());

  Mat re = S2[ev.first_slot + k - 1];
  for (int i = ev.first_slot + k - 2; i >= ev.first_slot; --i) re = re * S2[i];
  double scale = 1.0 + prod.cwiseAbs().maxCoeff();
  if ((re - prod).cwiseAbs().maxCoeff() > kTransportProductTol * scale)
    throw std::runtime_error("collision refactorization failed the product check");

  pt.S = std::move(S2);
  return out;
}

inline StokesRep apply_event(const StokesRep& rep, const WallEvent& ev) {
  return ev.kind == WallEvent::Kind::CutCrossing ? apply_cut_crossing(rep, ev)
                                                 : apply_collision(rep, ev);
}

struct InvarianceReport {
  double tol = 0.0;
  double relation_residual = 0.0;  // defect of the surface group relation after transport
  double class_drift = 0.0;        // worst formal-monodromy eigenvalue drift over all points
  double omega_drift = 0.0;        // two-form pullback defect at sampled tangents
  bool stable_before = false;
  bool stable_after = false;

  bool ok() const {
    return relation_residual <= tol && class_drift <= tol && omega_drift <= tol &&
           stable_before == stable_after;
  }
};

struct TransportResult {
  int point = 0;
  StokesRep rep;              // transported representation
  IrregularCurve curve;       // curve with the deformed type and pinned cut
  std::vector<WallEvent> events;
  InvarianceReport report;
};

namespace detail {

// Worst eigenvalue displacement between two matrices, minimized over
// pairings. Exhaustive for small rank, greedy beyond.
inline double eig_drift(const Mat& a, const Mat& b) {
  const int n = static_cast<int>(a.rows());
  Eigen::ComplexEigenSolver<Mat> ea(a), eb(b);
  std::vector<Cx> la(n), lb(n);
  for (int i = 0; i < n; ++i) {
    la[i] = ea.eigenvalues()(i);
    lb[i] = eb.eigenvalues()(i);
  }
  if (n <= 6) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    double best = std::numeric_limits<double>::infinity();
    do {
      double worst = 0.0;
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(la[i] - lb[idx[i]]));
      best = std::min(best, worst);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
  }
  double worst = 0.0;
  std::vector<char> used(n, 0);
  for (int i = 0; i < n; ++i) {
    int pick = -1;
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (!used[j] && std::abs(la[i] - lb[j]) < dmin) {
        dmin = std::abs(la[i] - lb[j]);
        pick = j;
      }
    used[pick] = 1;
    worst = std::max(worst, dmin);
  }
  return worst;
}

inline std::shared_ptr<const qh::ChainSpace> slot_space(
    const IrregularType& q, const std::vector<UnipotentPattern>& pats) {
  return std::make_shared<qh::ChainSpace>(q.n, lie::full_partition(q.n), irr::centralizer(q),
                                          pats, "local factor");
}

inline qh::Point chain_point(const wild::PointMonodromy& pt) {
  qh::Point p;
  p.f.push_back(pt.C);
  p.f.push_back(pt.h);
  for (const auto& s : pt.S) p.f.push_back(s);
  return p;
}

inline morph::MappedPoint push_event(const qh::ChainSpace& sp, const qh::Point& p,
                                     const qh::Tangent& u, const WallEvent& ev) {
  if (ev.kind == WallEvent::Kind::CutCrossing)
    return ev.sense > 0 ? morph::rotate(sp, p, u) : morph::rotate_back(sp, p, u);
  return morph::refactor_segment(sp, p, u, ev.first_slot,
                                 static_cast<int>(ev.old_order.size()), ev.new_order);
}

}  // namespace detail

// Transports `rep` along the deformation and measures every invariant. The
// two-form check runs the same events as exact jet maps on the local chain
// factor, pushing a few random tangent pairs through the whole composite.
inline TransportResult transport(const IrregularCurve& curve, const StokesRep& rep,
                                 const DeformationPath& path, double tol = 1e-9,
                                 std::uint64_t tangent_seed = 2026) {
  PathAnalysis an = analyze(curve, path);
  const int pi = path.point;
  if (static_cast<int>(rep.points.size()) != curve.marked_count())
    throw std::invalid_argument("transport: representation does not match the curve");
  if (rep.points[pi].S.size() != an.initial_slots.size())
    throw std::invalid_argument("transport: factor count does not match the structure");

  TransportResult res;
  res.point = pi;
  res.events = an.events;

  StokesRep cur = rep;
  for (const auto& ev : an.events) cur = apply_event(cur, ev);

  IrregularCurve fc = curve;
  fc.types[pi] = an.refined.samples.back();
  if (fc.cuts.size() != fc.types.size()) fc.cuts.assign(fc.types.size(), std::nullopt);
  fc.cuts[pi] = an.cut;
  res.curve = fc;

  InvarianceReport rr;
  rr.tol = tol;
  rr.relation_residual = wild::check_relation(cur);
  for (size_t i = 0; i < rep.points.size(); ++i)
    rr.class_drift = std::max(rr.class_drift, detail::eig_drift(rep.points[i].h, cur.points[i].h));

  auto sp0 = detail::slot_space(curve.types[pi], an.initial_slots);
  qh::Point p0 = detail::chain_point(rep.points[pi]);
  if (!sp0->contains(p0, 1e-6))
    throw std::invalid_argument("transport: factors do not lie in the slot groups");
  Rng rng(tangent_seed);
  for (int trial = 0; trial < 3; ++trial) {
    qh::Tangent u = sp0->random_tangent(rng, p0);
    qh::Tangent v = sp0->random_tangent(rng, p0);
    Cx before = sp0->omega(p0, u, v);
    std::shared_ptr<const qh::ChainSpace> sp = sp0;
    qh::Point p = p0;
    for (const auto& ev : an.events) {
      morph::MappedPoint mu = detail::push_event(*sp, p, u, ev);
      morph::MappedPoint mv = detail::push_event(*sp, p, v, ev);
      sp = mu.space;
      p = mu.point;
      u = mu.tangent;
      v = mv.tangent;
    }
    Cx after = sp->omega(p, u, v);
    rr.omega_drift = std::max(rr.omega_drift, std::abs(after - before));
    if (trial == 0) {
      // the jet walk and the matrix walk must land on the same point
      qh::Point q = detail::chain_point(cur.points[pi]);
      if (q.f.size() != p.f.size())
        throw std::logic_error("transport: jet walk and matrix walk disagree");
      for (size_t i = 0; i < q.f.size(); ++i)
        if (dist(q.f[i], p.f[i]) > 1e-8 * (1.0 + q.f[i].norm()))
          throw std::logic_error("transport: jet walk and matrix walk disagree");
    }
  }

  rr.stable_before = wild::is_stable(curve, rep);
  rr.stable_after = wild::is_stable(fc, cur);
  res.report = rr;
  res.rep = std::move(cur);
  return res;
}

inline InvarianceReport verify_transport(const IrregularCurve& curve, const StokesRep& rep,
                                         const DeformationPath& path, double tol = 1e-9) {
  return transport(curve, rep, path, tol).report;
}

// ---- JSON ----------------------------------------------------------------

inline nlohmann::json pattern_to_json(const UnipotentPattern& p) {
  auto arr = nlohmann::json::array();
  for (auto [i, j] : p.roots) arr.push_back(nlohmann::json::array({i, j}));
  return arr;
}

inline nlohmann::json event_to_json(const WallEvent& ev) {
  nlohmann::json j;
  j["kind"] = ev.kind == WallEvent::Kind::CutCrossing ? "cut_crossing" : "collision";
  j["time"] = ev.time;
  j["point"] = ev.point;
  j["angle"] = ev.angle;
  j["slot"] = ev.first_slot;
  if (ev.kind == WallEvent::Kind::CutCrossing) {
    j["sense"] = ev.sense;
    j["support"] = pattern_to_json(ev.old_order.front());
  } else {
    auto olds = nlohmann::json::array();
    for (const auto& p : ev.old_order) olds.push_back(pattern_to_json(p));
    auto news = nlohmann::json::array();
    for (const auto& p : ev.new_order) news.push_back(pattern_to_json(p));
    j["old_order"] = std::move(olds);
    j["new_order"] = std::move(news);
  }
  return j;
}

inline nlohmann::json mat_to_json(const Mat& m) {
  auto rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(nlohmann::json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json rep_to_json(const StokesRep& rep) {
  nlohmann::json j;
  j["n"] = rep.n;
  auto hs = nlohmann::json::array();
  for (const auto& h : rep.handles) hs.push_back(mat_to_json(h));
  j["handles"] = std::move(hs);
  auto pts = nlohmann::json::array();
  for (const auto& pt : rep.points) {
    nlohmann::json pj;
    pj["C"] = mat_to_json(pt.C);
    pj["h"] = mat_to_json(pt.h);
    auto ss = nlohmann::json::array();
    for (const auto& s : pt.S) ss.push_back(mat_to_json(s));
    pj["S"] = std::move(ss);
    pts.push_back(std::move(pj));
  }
  j["points"] = std::move(pts);
  return j;
}

inline nlohmann::json report_to_json(const InvarianceReport& r) {
  nlohmann::json j;
  j["tol"] = r.tol;
  j["relation_residual"] = r.relation_residual;
  j["class_drift"] = r.class_drift;
  j["omega_drift"] = r.omega_drift;
  j["stable_before"] = r.stable_before;
  j["stable_after"] = r.stable_after;
  j["ok"] = r.ok();
  return j;
}

inline nlohmann::json transport_result_to_json(const TransportResult& res) {
  nlohmann::json j;
  j["point"] = res.point;
  auto evs = nlohmann::json::array();
  for (const auto& ev : res.events) evs.push_back(event_to_json(ev));
  j["events"] = std::move(evs);
  j["report"] = report_to_json(res.report);
  j["final_type"] = irr::irregular_to_json(res.curve.types[res.point]);
  j["final_rep"] = rep_to_json(res.rep);
  return j;
}

}  // namespace wildcat::braid
