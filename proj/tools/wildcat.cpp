// Command line front end. Subcommands parse a JSON configuration, dispatch
// into the library, and write a machine readable report (JSON, or CSV for
// plot-data) to --out or stdout. Exit codes: 0 computed and every check
// passed, 1 a verification failed, 2 malformed or uncertifiable input.
//
// Identical configuration and seed produce byte-identical reports; nothing
// time- or host-dependent is ever written.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wildcat/braid/transport.hpp"
#include "wildcat/morphisms/vdb.hpp"
#include "wildcat/qh/verify.hpp"
#include "wildcat/qh/zoo.hpp"
#include "wildcat/wild/dimension.hpp"
#include "wildcat/wild/genericity.hpp"
#include "wildcat/wild/sampler.hpp"
#include "wildcat/wild/stability.hpp"

namespace {

using namespace wildcat;
using nlohmann::json;

struct Options {
  std::string input;
  std::string out;
  std::string space = "all";
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int samples = 0;  // 0 = per-command default
  bool corrupt = false;
};

json load_config(const std::string& path, const std::vector<std::string>& allowed) {
  if (path.empty()) throw std::invalid_argument("missing required option --input");
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("input is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("input: top level must be an object");
  for (const auto& [key, val] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument("input: unknown field \"" + key + "\"");
  }
  return j;
}

void write_text(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file \"" + out + "\"");
  f << text;
}

void emit(const Options& opt, const json& report) {
  write_text(opt.out, report.dump(2) + "\n");
}

// Shortest round-trip formatting, locale independent, for CSV cells.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json partition_json(const lie::Partition& p) {
  json out = json::array();
  for (const auto& blk : p) out.push_back(blk);
  return out;
}

json roots_json(const std::vector<lie::Root>& roots) {
  json out = json::array();
  for (auto r : roots) out.push_back({r.first, r.second});
  return out;
}

// ---- stokes ----------------------------------------------------------------

json structure_report(const irr::IrregularType& ty, std::optional<double> cut) {
  auto st = irr::singular_directions(ty, cut);
  json dirs = json::array();
  for (const auto& d : st.dirs) {
    json levels = json::object();
    for (const auto& [k, roots] : d.by_level) levels[std::to_string(k)] = roots_json(roots);
    dirs.push_back({{"angle", d.angle},
                    {"from_cut", d.from_cut},
                    {"roots", roots_json(d.support)},
                    {"by_level", levels}});
  }
  auto chain = irr::levi_chain(ty);
  json chain_j = json::array();
  for (size_t t = 0; t < chain.levels.size(); ++t)
    chain_j.push_back({{"order", ty.ks[t]},
                       {"levi", partition_json(chain.levels[t])},
                       {"new_roots", roots_json(chain.complements[t])}});
  return {{"n", ty.n},
          {"orders", ty.ks},
          {"total_degree", irr::total_degree(ty)},
          {"space_dim", qh::expected_stokes_dim(ty)},
          {"cut", st.cut},
          {"levi", partition_json(st.levi)},
          {"levi_chain", chain_j},
          {"direction_count", st.count()},
          {"directions", dirs}};
}

int cmd_stokes(const Options& opt) {
  json cfg = load_config(opt.input, {"type", "cut", "curve"});
  json report;
  if (cfg.contains("curve")) {
    auto curve = wild::curve_from_json(cfg.at("curve"));
    json pts = json::array();
    for (size_t i = 0; i < curve.types.size(); ++i) {
      std::optional<double> cut;
      if (!curve.cuts.empty()) cut = curve.cuts[i];
      pts.push_back(structure_report(curve.types[i], cut));
    }
    report = {{"genus", curve.genus}, {"points", pts}};
  } else if (cfg.contains("type")) {
    std::optional<double> cut;
    if (cfg.contains("cut")) cut = cfg.at("cut").get<double>();
    report = structure_report(irr::irregular_from_json(cfg.at("type")), cut);
  } else {
    throw std::invalid_argument("input: need field \"type\" or \"curve\"");
  }
  emit(opt, report);
  return 0;
}

// ---- verify ----------------------------------------------------------------

// Negative control: the same space with its two-form scaled off the axioms.
class ScaledOmegaSpace final : public qh::Space {
 public:
  explicit ScaledOmegaSpace(qh::SpacePtr inner) : inner_(std::move(inner)) {
    factors_ = inner_->factors();
    slots_ = inner_->slots();
    name_ = inner_->name() + " [corrupted]";
  }
  std::vector<Mat> moment(const qh::Point& p) const override { return inner_->moment(p); }
  std::vector<Mat> moment_mc(const qh::Point& p, const qh::Tangent& u) const override {
    return inner_->moment_mc(p, u);
  }
  Cx omega(const qh::Point& p, const qh::Tangent& u, const qh::Tangent& v) const override {
    return 1.01 * inner_->omega(p, u, v);
  }
  qh::Point act(const qh::Point& p, const qh::GroupTuple& g) const override {
    return inner_->act(p, g);
  }
  qh::Tangent push(const qh::Point& p, const qh::GroupTuple& g,
                   const qh::Tangent& u) const override {
    return inner_->push(p, g, u);
  }
  qh::Tangent fundamental(const qh::Point& p, const qh::LieTuple& x) const override {
    return inner_->fundamental(p, x);
  }
  qh::Point random_point(Rng& rng) const override { return inner_->random_point(rng); }
  qh::Tangent random_tangent(Rng& rng, const qh::Point& p) const override {
    return inner_->random_tangent(rng, p);
  }
  bool contains(const qh::Point& p, double tol = 1e-8) const override {
    return inner_->contains(p, tol);
  }
  std::unique_ptr<qh::FactorChart> factor_chart(int idx, const Mat& base) const override {
    return inner_->factor_chart(idx, base);
  }

 private:
  qh::SpacePtr inner_;
};

int cmd_verify(const Options& opt) {
  std::vector<std::string> names;
  if (opt.space == "all")
    names = qh::all_space_names();
  else
    names = {opt.space};

  const int per_space = opt.samples > 0 ? opt.samples : 1;
  json rows = json::array();
  bool all_pass = true;
  for (const auto& name : names) {
    qh::SpacePtr sp = qh::named_space(name);
    if (opt.corrupt) sp = std::make_shared<ScaledOmegaSpace>(sp);
    for (int i = 0; i < per_space; ++i) {
      auto rep = qh::verify_space(*sp, opt.seed + static_cast<std::uint64_t>(i));
      bool pass = rep.pass();
      all_pass = all_pass && pass;
      json row = rep.to_json();
      row["pass"] = pass;
      rows.push_back(std::move(row));
    }
  }
  emit(opt, json{{"three_form_scale", qh::kThreeFormScale},
                 {"spaces", rows},
                 {"all_pass", all_pass}});
  return all_pass ? 0 : 1;
}

// ---- stability / genericity ------------------------------------------------

struct CurveConfig {
  wild::IrregularCurve curve;
  wild::ClassList classes;
};

CurveConfig curve_config(const json& cfg) {
  CurveConfig cc;
  if (!cfg.contains("curve")) throw std::invalid_argument("input: missing field \"curve\"");
  cc.curve = wild::curve_from_json(cfg.at("curve"));
  cc.classes = wild::classes_from_json(cfg, cc.curve);
  return cc;
}

int cmd_stability(const Options& opt) {
  auto cc = curve_config(load_config(opt.input, {"curve", "classes"}));
  const int samples = opt.samples > 0 ? opt.samples : 20;
  json rows = json::array();
  int stable_count = 0;
  bool crosscheck_ok = true;
  for (int i = 0; i < samples; ++i) {
    std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(i);
    auto rep = wild::sample_point(cc.curve, cc.classes, seed);
    bool stable = wild::is_stable(cc.curve, rep, opt.tol);
    bool torus = wild::is_stable_torus(cc.curve, rep, opt.tol);
    stable_count += stable ? 1 : 0;
    crosscheck_ok = crosscheck_ok && (stable == torus);
    rows.push_back({{"seed", seed},
                    {"relation_residual", wild::check_relation(rep)},
                    {"stable", stable},
                    {"stable_torus", torus}});
  }
  emit(opt, json{{"samples", samples},
                 {"stable_count", stable_count},
                 {"all_stable", stable_count == samples},
                 {"generator_crosscheck", crosscheck_ok},
                 {"per_sample", rows}});
  return crosscheck_ok ? 0 : 1;
}

int cmd_genericity(const Options& opt) {
  auto cc = curve_config(load_config(opt.input, {"curve", "classes"}));
  auto rep = wild::is_generic(cc.curve, cc.classes, opt.tol);
  json witness = json::array();
  for (const auto& sel : rep.witness) witness.push_back(sel);
  emit(opt, json{{"generic", rep.generic},
                 {"determinant_ok", rep.determinant_ok},
                 {"exhaustive", rep.exhaustive},
                 {"witness", witness},
                 {"witness_product", {rep.witness_product.real(), rep.witness_product.imag()}}});
  return 0;
}

// ---- dims --------------------------------------------------------------------

int cmd_dims(const Options& opt) {
  auto cc = curve_config(load_config(opt.input, {"curve", "classes"}));
  const int expected = wild::expected_dim(cc.curve, cc.classes);
  const int attempts = opt.samples > 0 ? opt.samples : 10;

  wild::StokesRep rep;
  bool stable = false;
  std::uint64_t used_seed = opt.seed;
  for (int i = 0; i < attempts && !stable; ++i) {
    used_seed = opt.seed + static_cast<std::uint64_t>(i);
    rep = wild::sample_point(cc.curve, cc.classes, used_seed);
    stable = wild::is_stable(cc.curve, rep, opt.tol);
  }
  if (!stable)
    throw std::runtime_error("no stable point found in " + std::to_string(attempts) +
                             " attempts; dimension count needs a stable point");

  auto nd = wild::numeric_dim_check(cc.curve, rep, opt.tol);
  bool match = nd.measured == expected && !nd.orbit_deficient;
  emit(opt, json{{"expected", expected},
                 {"measured", nd.measured},
                 {"chart_dim", nd.chart_dim},
                 {"constraint_rank", nd.constraint_rank},
                 {"orbit_rank", nd.orbit_rank},
                 {"orbit_deficient", nd.orbit_deficient},
                 {"seed", used_seed},
                 {"match", match}});
  return match ? 0 : 1;
}

// ---- braid -------------------------------------------------------------------

int cmd_braid(const Options& opt) {
  json cfg = load_config(opt.input, {"curve", "classes", "path"});
  auto cc = curve_config(cfg);
  if (!cfg.contains("path")) throw std::invalid_argument("input: missing field \"path\"");
  auto path = braid::path_from_json(cfg.at("path"), cc.curve);

  auto rep = wild::sample_point(cc.curve, cc.classes, opt.seed);
  auto res = braid::transport(cc.curve, rep, path, opt.tol, opt.seed + 1);
  json report = braid::transport_result_to_json(res);
  report["seed"] = opt.seed;
  emit(opt, report);
  return res.report.ok() ? 0 : 1;
}

// ---- vdb ---------------------------------------------------------------------

int cmd_vdb(const Options& opt) {
  std::vector<std::pair<int, int>> shapes;
  if (opt.space == "all")
    shapes = {{1, 1}, {2, 1}, {2, 2}};
  else {
    int nv = 0, nw = 0;
    if (std::sscanf(opt.space.c_str(), "pair-%d-%d", &nv, &nw) != 2 || nv < 1 || nw < 1)
      throw std::invalid_argument("--space for vdb must be \"all\" or \"pair-<nv>-<nw>\"");
    shapes = {{nv, nw}};
  }
  const int samples = opt.samples > 0 ? opt.samples : 100;
  const double form_tol = 1e-9;

  json rows = json::array();
  bool all_pass = true;
  for (auto [nv, nw] : shapes) {
    qh::PairSpace pairs(nv, nw);
    Rng rng(opt.seed + static_cast<std::uint64_t>(100 * nv + nw));
    double rel_max = 0.0, form_max = 0.0, reversal_max = 0.0;
    for (int i = 0; i < samples; ++i) {
      qh::Point p = pairs.random_point(rng);
      qh::Tangent u = pairs.random_tangent(rng, p);
      qh::Tangent v = pairs.random_tangent(rng, p);
      const Mat& a = p.f[0];
      const Mat& b = p.f[1];

      auto su = morph::pair_to_chain(pairs, p, u);
      auto sv = morph::pair_to_chain(pairs, p, v);

      // defining relations of the slice
      Mat x = eye(nv) + a * b;
      Mat y = (eye(nw) + b * a).inverse();
      const qh::Point& s = su.point;
      double rel = dist(s.f[1].block(0, 0, nv, nv), x);
      rel = std::max(rel, dist(s.f[1].block(nv, nv, nw, nw), y));
      rel = std::max(rel, dist(s.f[4].block(0, nv, nv, nw), Mat(-x.inverse() * a)));
      rel = std::max(rel, dist(s.f[5].block(nv, 0, nw, nv), Mat(-(b + b * a * b))));
      rel = std::max(rel, dist(su.space->b_value(s), eye(nv + nw)));
      auto [ra, rb] = morph::chain_to_pair(s, nv, nw);
      rel = std::max(rel, std::max(dist(ra, a), dist(rb, b)));
      rel_max = std::max(rel_max, rel);

      // two-form agreement through the slice
      Cx wp = pairs.omega(p, u, v);
      Cx wc = su.space->omega(s, su.tangent, sv.tangent);
      form_max = std::max(form_max, std::abs(wp - wc));

      // composed edge reversal
      auto [a2, b2] = morph::pair_reversal(a, b);
      double rev = dist(a2, b);
      rev = std::max(rev, dist(b2, Mat(-(eye(nv) + a * b).inverse() * a)));
      reversal_max = std::max(reversal_max, rev);
    }
    bool pass = rel_max <= 1e-12 && form_max <= form_tol && reversal_max <= 1e-12;
    all_pass = all_pass && pass;
    rows.push_back({{"shape", {nv, nw}},
                    {"samples", samples},
                    {"relation_residual", rel_max},
                    {"two_form_residual", form_max},
                    {"reversal_residual", reversal_max},
                    {"pass", pass}});
  }
  emit(opt, json{{"shapes", rows}, {"all_pass", all_pass}});
  return all_pass ? 0 : 1;
}

// ---- plot-data -----------------------------------------------------------------

int cmd_plot_data(const Options& opt) {
  json cfg = load_config(opt.input, {"type", "cut", "curve", "path"});
  std::ostringstream csv;
  if (cfg.contains("path")) {
    auto cc = curve_config(cfg);
    auto path = braid::path_from_json(cfg.at("path"), cc.curve);
    auto rp = braid::refine_path(cc.curve, path);
    auto rays = braid::detail::track_rays(rp);
    csv << "time";
    for (const auto& r : rays)
      csv << ",ray_" << r.root.first << "_" << r.root.second << "_b" << r.branch;
    csv << "\n";
    for (size_t s = 0; s < rp.times.size(); ++s) {
      csv << num(rp.times[s]);
      for (const auto& r : rays) csv << "," << num(r.angle[s]);
      csv << "\n";
    }
  } else if (cfg.contains("type")) {
    std::optional<double> cut;
    if (cfg.contains("cut")) cut = cfg.at("cut").get<double>();
    auto st = irr::singular_directions(irr::irregular_from_json(cfg.at("type")), cut);
    csv << "angle,from_cut,root_i,root_j,level\n";
    for (const auto& d : st.dirs)
      for (const auto& [level, roots] : d.by_level)
        for (auto r : roots)
          csv << num(d.angle) << "," << num(d.from_cut) << "," << r.first << "," << r.second
              << "," << level << "\n";
  } else {
    throw std::invalid_argument("input: need field \"path\" (with \"curve\") or \"type\"");
  }
  write_text(opt.out, csv.str());
  return 0;
}

int dispatch(const std::string& name, const Options& opt) {
  try {
    if (name == "stokes") return cmd_stokes(opt);
    if (name == "verify") return cmd_verify(opt);
    if (name == "stability") return cmd_stability(opt);
    if (name == "genericity") return cmd_genericity(opt);
    if (name == "dims") return cmd_dims(opt);
    if (name == "braid") return cmd_braid(opt);
    if (name == "vdb") return cmd_vdb(opt);
    if (name == "plot-data") return cmd_plot_data(opt);
    std::cerr << json{{"error", "unknown command " + name}}.dump(2) << "\n";
    return 2;
  } catch (const braid::RefinePathError& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "path"}}.dump(2) << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "input"}}.dump(2) << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "input"}}.dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "verification"}}.dump(2) << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stokes-data spaces: structure reports, axiom verification, braid transport"};
  app.require_subcommand(1);

  Options opt;
  std::vector<CLI::App*> subs;
  for (const char* name : {"stokes", "verify", "stability", "genericity", "dims", "braid",
                           "vdb", "plot-data"}) {
    auto* sub = app.add_subcommand(name, "");
    sub->add_option("--input", opt.input, "JSON configuration file");
    sub->add_option("--seed", opt.seed, "base RNG seed");
    sub->add_option("--tol", opt.tol, "tolerance for the command's checks");
    sub->add_option("--out", opt.out, "output file (default stdout)");
    sub->add_option("--space", opt.space, "space name or \"all\"");
    sub->add_option("--samples", opt.samples, "sample count (0 = command default)");
    sub->add_flag("--corrupt", opt.corrupt)->group("");  // negative control, hidden
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto* sub : subs)
    if (sub->parsed()) return dispatch(sub->get_name(), opt);
  return 2;
}
