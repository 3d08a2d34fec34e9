// bellman-mt: command-line front end for the Bellman-function library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bellman/bellman.hpp"

using json = nlohmann::ordered_json;
using namespace bmt;

namespace {

constexpr const char* kSchema = "bellman-mt/1";

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string command;
  std::optional<double> p;
  std::string point;
  std::string which {"max"};
  std::optional<int> grid_n;
  std::optional<double> box_l;
  std::optional<int> depth;
  std::uint64_t seed {1};
  std::optional<double> eps;
  std::optional<double> tol;
  std::string format {"json"};
  std::string out;
  // command-specific
  std::string suite {"all"};
  std::string region {"standard"};
  std::string boundary {"pin_u_p"};
  int samples {1000};
  std::optional<double> c_lo;
  std::optional<double> c_hi;
};

// Output: one JSON document or one CSV table.
struct Output {
  json doc = json::object();
  std::string csv_header;
  std::vector<std::vector<std::string>> csv_rows;
};

std::string fmt_json_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

void emit_json(const json& j, std::string& out, int indent) {
  std::string pad(std::size_t(indent + 2), ' '), close(std::size_t(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        emit_json(it.value(), out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit_json(j[i], out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit_json(j[i], out, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      out += fmt_json_number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

void write_output(const Config& cfg, Output& o) {
  std::string text;
  if (cfg.format == "json") {
    json doc = json::object();
    doc["schema"] = kSchema;
    doc["command"] = cfg.command;
    for (auto it = o.doc.begin(); it != o.doc.end(); ++it) doc[it.key()] = it.value();
    emit_json(doc, text, 0);
    text += "\n";
  } else {
    text = o.csv_header + "\n";
    for (const auto& row : o.csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) text += ",";
        text += row[i];
      }
      text += "\n";
    }
  }
  if (cfg.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw InvalidInput("cannot open output file " + cfg.out);
  f << text;
  if (!f) throw InvalidInput("cannot write output file " + cfg.out);
}

ExponentParams need_p(const Config& cfg) {
  if (!cfg.p) throw InvalidInput("--p is required for " + cfg.command);
  return exponent_params(*cfg.p);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double d = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size() || !std::isfinite(d)) throw std::invalid_argument(item);
      v.push_back(d);
    } catch (const std::exception&) {
      throw InvalidInput("--point: cannot parse '" + item + "' as a number");
    }
  }
  return v;
}

OmegaPoint need_point(const Config& cfg) {
  if (cfg.point.empty()) throw InvalidInput("--point x1,x2,x3 is required for " + cfg.command);
  auto v = parse_list(cfg.point);
  if (v.size() != 3) throw InvalidInput("--point needs exactly three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

Which parse_which(const Config& cfg) { return cfg.which == "min" ? Which::min : Which::max; }

json triple(double a, double b, double c) { return json::array({a, b, c}); }

int positive_int(std::optional<int> v, int def, int min, const char* flag) {
  int r = v.value_or(def);
  if (r < min) throw InvalidInput(std::string(flag) + " must be >= " + std::to_string(min));
  return r;
}

// eval

int cmd_eval(const Config& cfg, Output& o) {
  auto e = need_p(cfg);
  OmegaPoint x = need_point(cfg);
  Which w = parse_which(cfg);
  auto b = bellman(x, e, w);
  double sc = 1.0;
  double res = equation_residual(x, b.value, e, w, &sc);
  o.doc["p"] = e.p;
  o.doc["point"] = triple(x.x1, x.x2, x.x3);
  o.doc["which"] = to_string(w);
  o.doc["value"] = b.value;
  o.doc["omega"] = b.omega;
  o.doc["sector"] = to_string(b.sector);
  o.doc["iterations"] = b.iterations;
  o.doc["residual"] = res / sc;
  o.csv_header = "p,x1,x2,x3,which,value,omega,sector";
  o.csv_rows.push_back({csv_num(e.p), csv_num(x.x1), csv_num(x.x2), csv_num(x.x3), to_string(w),
                        csv_num(b.value), csv_num(b.omega), to_string(b.sector)});
  return 0;
}

// scan

int cmd_scan(const Config& cfg, Output& o) {
  auto e = need_p(cfg);
  Which w = parse_which(cfg);
  int n = positive_int(cfg.grid_n, 200, 16, "--grid-n");
  ScanRegion region = cfg.region == "opposite" ? ScanRegion::opposite : ScanRegion::standard;
  double est = sharp_constant_scan(e, w, n, region);
  double target = w == Which::max ? e.beta : 1.0 / e.beta;
  double rel = std::fabs(est - target) / target;
  o.doc["p"] = e.p;
  o.doc["which"] = to_string(w);
  o.doc["region"] = cfg.region;
  o.doc["grid_n"] = n;
  o.doc["estimate"] = est;
  o.doc["target"] = target;
  o.doc["rel_error"] = rel;
  o.csv_header = "p,which,region,grid_n,estimate,target,rel_error";
  o.csv_rows.push_back({csv_num(e.p), to_string(w), cfg.region, std::to_string(n), csv_num(est), csv_num(target),
                        csv_num(rel)});
  return 0;
}

// verify

int cmd_verify(const Config& cfg, Output& o) {
  auto e = need_p(cfg);
  std::vector<std::string> names;
  if (cfg.suite == "all") names = suite_names();
  else names.push_back(cfg.suite);
  json suites = json::array();
  o.csv_header = "suite,passed,checks,failures,worst";
  bool all = true;
  for (const auto& name : names) {
    SuiteResult r = run_suite(name, e, cfg.seed);
    all = all && r.passed();
    suites.push_back({{"suite", r.name}, {"passed", r.passed()}, {"checks", r.checks}, {"failures", r.failures},
                      {"worst", r.worst}});
    o.csv_rows.push_back({r.name, csv_bool(r.passed()), std::to_string(r.checks), std::to_string(r.failures),
                          csv_num(r.worst)});
    std::fprintf(stderr, "%-18s %s  checks=%ld failures=%ld worst=%.3g\n", r.name.c_str(),
                 r.passed() ? "PASS" : "FAIL", r.checks, r.failures, r.worst);
  }
  o.doc["p"] = e.p;
  o.doc["seed"] = cfg.seed;
  o.doc["suites"] = suites;
  o.doc["passed"] = all;
  return all ? 0 : 1;
}

// simulate

int cmd_simulate(const Config& cfg, Output& o) {
  auto e = need_p(cfg);
  int depth = positive_int(cfg.depth, 8, 1, "--depth");
  if (depth > 24) throw InvalidInput("--depth must be <= 24");
  if (cfg.samples < 1) throw InvalidInput("--samples must be >= 1");
  SplitMix64 rng(cfg.seed);
  o.csv_header = "index,x1,x2,x3,g_p_mean,b_max,b_min,admissible,within_bounds";
  json rows = json::array();
  long violations = 0;
  double worst_ratio = 0.0;
  for (int k = 0; k < cfg.samples; ++k) {
    auto f = random_step_function(depth, rng.uniform(-1.0, 1.0), rng);
    auto pair = random_transform(f, rng.next(), e, rng.uniform(-1.0, 1.0));
    bool adm = admissibility_check(pair).ok;
    double gp = pair.g.p_mean(e.p);
    double hi = bellman_max(pair.point, e).value, lo = bellman_min(pair.point, e).value;
    double tol = 1e-9 * std::max(1.0, hi);
    bool ok = gp <= hi + tol && gp >= lo - tol;
    if (!ok || !adm) ++violations;
    if (hi > 0.0) worst_ratio = std::max(worst_ratio, gp / hi);
    const auto& x = pair.point;
    rows.push_back({{"x", triple(x.x1, x.x2, x.x3)}, {"g_p_mean", gp}, {"b_max", hi}, {"b_min", lo},
                    {"admissible", adm}, {"within_bounds", ok}});
    o.csv_rows.push_back({std::to_string(k), csv_num(x.x1), csv_num(x.x2), csv_num(x.x3), csv_num(gp), csv_num(hi),
                          csv_num(lo), csv_bool(adm), csv_bool(ok)});
  }
  o.doc["p"] = e.p;
  o.doc["depth"] = depth;
  o.doc["seed"] = cfg.seed;
  o.doc["samples"] = cfg.samples;
  o.doc["violations"] = violations;
  o.doc["max_ratio_to_b_max"] = worst_ratio;
  o.doc["pairs"] = rows;
  return violations == 0 ? 0 : 1;
}

// extremal

int cmd_extremal(const Config& cfg, Output& o) {
  auto e = need_p(cfg);
  bool exch = e.p < 2.0;
  OmegaPoint x = exch ? OmegaPoint {1.0, 0.0, 2.0} : OmegaPoint {0.0, 1.0, 1.0};
  if (!cfg.point.empty()) {
    x = need_point(cfg);
    if (!exch && x.x1 != 0.0) throw InvalidInput("extremal: for p >= 2 the point must be (0, m, x3)");
    if (exch && x.x2 != 0.0) throw InvalidInput("extremal: for p < 2 the point must be (m, 0, x3)");
  }
  double m = exch ? x.x1 : x.x2;
  double eps = cfg.eps.value_or(0.01);
  int levels_out = positive_int(cfg.depth, 64, 1, "--depth");
  auto s = extremal_sequence(m, x.x3, eps, e);
  double bmax = bellman_max(x, e).value;
  double adm = extremal_admissibility(s);
  o.doc["p"] = e.p;
  o.doc["point"] = triple(x.x1, x.x2, x.x3);
  o.doc["eps"] = eps;
  o.doc["roles_exchanged"] = s.roles_exchanged;
  o.doc["c0"] = s.c0;
  o.doc["c"] = s.c;
  o.doc["gamma"] = s.gamma;
  o.doc["d_minus"] = s.d_minus;
  o.doc["d_plus"] = s.d_plus;
  o.doc["r"] = s.r;
  o.doc["levels"] = s.levels;
  o.doc["predicted_limit"] = s.predicted_limit;
  o.doc["b_max"] = bmax;
  o.doc["achieved"] = s.achieved;
  o.doc["achieved_infinite"] = s.achieved_infinite;
  o.doc["tail_bound"] = s.tail_bound;
  o.doc["rel_gap"] = (s.predicted_limit - s.achieved) / s.predicted_limit;
  o.doc["pair_point"] = triple(s.point.x1, s.point.x2, s.point.x3);
  o.doc["admissibility_violation"] = adm;
  o.csv_header = "start,length,f,g";
  for (const auto& seg : s.segments(levels_out)) {
    o.csv_rows.push_back({csv_num(seg.start), csv_num(seg.length), csv_num(seg.f), csv_num(seg.g)});
  }
  return 0;
}

// envelope

int cmd_envelope(const Config& cfg, Output& o) {
  auto e = need_p(cfg);
  Which w = parse_which(cfg);
  double L = cfg.box_l.value_or(4.0);
  int n = positive_int(cfg.grid_n, 129, 33, "--grid-n");
  if (n % 2 == 0) throw InvalidInput("--grid-n must be odd for envelope");
  if (!(L > 0.0)) throw InvalidInput("--box-l must be > 0");
  BoundaryMode mode = cfg.boundary == "pin_closed_form" ? BoundaryMode::pin_closed_form
                    : cfg.boundary == "pin_h"           ? BoundaryMode::pin_h
                                                        : BoundaryMode::pin_u_p;
  EnvelopeOptions opt;
  if (cfg.tol) {
    if (!(*cfg.tol > 0.0)) throw InvalidInput("--tol must be > 0");
    opt.tol = *cfg.tol;
  }
  double sign = w == Which::max ? 1.0 : -1.0;
  Sampler h = sign > 0 ? Sampler([e](PlanePoint x) { return h_max(x, e); })
                       : Sampler([e](PlanePoint x) { return h_min(x, e); });
  Sampler bs = boundary_sampler(mode, e, sign);
  EnvelopeResult r = sign > 0 ? least_zigzag_majorant(h, L, n, bs, opt) : greatest_zigzag_minorant(h, L, n, bs, opt);
  double err = 0.0, sc = 0.0;
  o.csv_header = "x1,x2,value";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      PlanePoint x {r.field.coord(i), r.field.coord(j)};
      double v = r.field.at(i, j);
      o.csv_rows.push_back({csv_num(x.x1), csv_num(x.x2), csv_num(v)});
      if (std::max(std::fabs(x.x1), std::fabs(x.x2)) > L / 4.0) continue;
      double ref = sign > 0 ? phi_max(x, e) : phi_min(x, e);
      err = std::max(err, std::fabs(v - ref));
      sc = std::max(sc, std::fabs(ref));
    }
  }
  o.doc["p"] = e.p;
  o.doc["which"] = to_string(w);
  o.doc["L"] = L;
  o.doc["n"] = n;
  o.doc["boundary"] = to_string(mode);
  o.doc["sweeps"] = r.sweeps;
  o.doc["residual"] = r.residual;
  o.doc["interior_rel_error"] = sc > 0.0 ? err / sc : 0.0;
  o.doc["defect"] = zigzag_defect(r.field, sign);
  return 0;
}

// critical-c

int cmd_critical(const Config& cfg, Output& o) {
  auto e = need_p(cfg);
  std::vector<LadderBox> ladder = default_ladder();
  if (cfg.box_l || cfg.grid_n) {
    double L = cfg.box_l.value_or(32.0);
    int n = positive_int(cfg.grid_n, 513, 33, "--grid-n");
    if (n % 2 == 0) throw InvalidInput("--grid-n must be odd for critical-c");
    if (!(L > 0.0)) throw InvalidInput("--box-l must be > 0");
    ladder = {{L, n}, {2.0 * L, 2 * n - 1}};
  }
  double tol = cfg.tol.value_or(0.02 * e.beta);
  double lo = cfg.c_lo.value_or(0.5 * e.beta), hi = cfg.c_hi.value_or(2.0 * e.beta);
  if (!(tol > 0.0)) throw InvalidInput("--tol must be > 0");
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidInput("--c-lo/--c-hi must satisfy 0 < c-lo < c-hi");
  PlanePoint tp = default_test_point(e);
  auto r = critical_constant(e, ladder, tp, tol, lo, hi);
  json probes = json::array();
  o.csv_header = "c,value_small_box,value_large_box,growth,subcritical";
  for (const auto& pr : r.probes) {
    probes.push_back({{"c", pr.c}, {"values", pr.values}, {"growth", pr.growth}, {"subcritical", pr.subcritical}});
    o.csv_rows.push_back({csv_num(pr.c), csv_num(pr.values[pr.values.size() - 2]), csv_num(pr.values.back()),
                          csv_num(pr.growth), csv_bool(pr.subcritical)});
  }
  json boxes = json::array();
  for (const auto& b : ladder) boxes.push_back({{"L", b.L}, {"n", b.n}});
  o.doc["p"] = e.p;
  o.doc["beta"] = e.beta;
  o.doc["c_star"] = r.c_star;
  o.doc["lo"] = r.lo;
  o.doc["hi"] = r.hi;
  o.doc["rel_error"] = std::fabs(r.c_star - e.beta) / e.beta;
  o.doc["test_point"] = json::array({tp.x1, tp.x2});
  o.doc["ladder"] = boxes;
  o.doc["probes"] = probes;
  return 0;
}

// chords

json xi_json(const XiPoint& y) { return triple(y.y1, y.y2, y.y3); }

int cmd_chords(const Config& cfg, Output& o) {
  auto e = need_p(cfg);
  Which w = parse_which(cfg);
  CaseId c = case_which(CaseId::c3_2, e) == w ? CaseId::c3_2 : CaseId::c4_2;
  std::vector<XiPoint> pts;
  if (!cfg.point.empty()) {
    OmegaPoint x = need_point(cfg);
    require_omega(x, e, "chords");
    pts.push_back(to_xi({std::fabs(x.x1), std::fabs(x.x2), x.x3}));
  } else {
    int n = positive_int(cfg.grid_n, 9, 1, "--grid-n");
    double p = e.p, y1 = 1.0;
    double lo = c == CaseId::c3_2 ? ((p - 2.0) / p) * y1 : -y1;
    double hi = c == CaseId::c3_2 ? y1 : ((2.0 - p) / p) * y1;
    for (int k = 0; k < n; ++k) {
      double y2 = lo + (hi - lo) * (k + 0.5) / n;
      pts.push_back({y1, y2, pw(std::fabs(y1 - y2), p) + 1.0});
    }
  }
  json chords = json::array();
  o.csv_header = "case,omega,vertical,y1,y2,y3,u_y1,u_y2,u_y3,s_y1,s_y2,s_y3";
  for (const XiPoint& y : pts) {
    json j;
    j["point_xi"] = xi_json(y);
    if (!in_case_sector(y, c, e, 1e-12 * std::fabs(y.y1))) {
      // linear branch: the trajectory is vertical through the point
      auto b = bellman(to_omega(y), e, w);
      XiPoint u {y.y1, y.y2, pw(std::fabs(y.y1 - y.y2), e.p)};
      j["case"] = to_string(CaseId::c2_vertical);
      j["omega"] = b.omega;
      j["vertical"] = true;
      j["boundary_end"] = xi_json(u);
      j["symmetry_end"] = nullptr;
      o.csv_rows.push_back({to_string(CaseId::c2_vertical), csv_num(b.omega), "true", csv_num(y.y1), csv_num(y.y2),
                            csv_num(y.y3), csv_num(u.y1), csv_num(u.y2), csv_num(u.y3), "", "", ""});
    } else {
      auto ch = chord(y, e, c);
      j["case"] = to_string(c);
      j["omega"] = ch.omega;
      j["vertical"] = ch.vertical;
      j["u"] = ch.u;
      j["boundary_end"] = xi_json(ch.boundary_end);
      if (ch.vertical) j["symmetry_end"] = nullptr;
      else j["symmetry_end"] = xi_json(ch.symmetry_end);
      std::vector<std::string> row {to_string(c), csv_num(ch.omega), csv_bool(ch.vertical), csv_num(y.y1),
                                    csv_num(y.y2), csv_num(y.y3), csv_num(ch.boundary_end.y1),
                                    csv_num(ch.boundary_end.y2), csv_num(ch.boundary_end.y3)};
      if (ch.vertical) row.insert(row.end(), {"", "", ""});
      else row.insert(row.end(), {csv_num(ch.symmetry_end.y1), csv_num(ch.symmetry_end.y2), csv_num(ch.symmetry_end.y3)});
      o.csv_rows.push_back(row);
    }
    chords.push_back(j);
  }
  o.doc["p"] = e.p;
  o.doc["which"] = to_string(w);
  o.doc["chords"] = chords;
  return 0;
}

void add_common(CLI::App* sub, Config& cfg) {
  sub->add_option("--p", cfg.p, "exponent p > 1");
  sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", cfg.out, "write output to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app {"Bellman functions for martingale transforms: evaluation, verification and numerical oracles.\n"
                "JSON output carries \"schema\": \"bellman-mt/1\" and 17 significant digits; CSV uses 12."};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "show help for all subcommands");

  auto which_opt = [&](CLI::App* s) {
    s->add_option("--which", cfg.which, "max or min")->check(CLI::IsMember({"max", "min"}));
  };

  auto* eval = app.add_subcommand("eval", "evaluate B_max or B_min at a point of the domain");
  add_common(eval, cfg);
  eval->add_option("--point", cfg.point, "x1,x2,x3 with x3 >= |x1|^p");
  which_opt(eval);
  eval->footer("CSV header: p,x1,x2,x3,which,value,omega,sector");

  auto* scan = app.add_subcommand("scan", "grid estimate of the sharp constant sup B/x3 (max) or inf B/x3 (min)");
  add_common(scan, cfg);
  which_opt(scan);
  scan->add_option("--grid-n", cfg.grid_n, "grid points per axis (default 200, >= 16)");
  scan->add_option("--region", cfg.region, "standard or opposite")->check(CLI::IsMember({"standard", "opposite"}));
  scan->footer("CSV header: p,which,region,grid_n,estimate,target,rel_error");

  auto* verify = app.add_subcommand("verify", "run invariant suites; exit 1 if any check fails");
  add_common(verify, cfg);
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify->add_option("--suite", cfg.suite, "suite name or all")->check(CLI::IsMember(suites));
  verify->add_option("--seed", cfg.seed, "random seed (default 1)");
  verify->footer("Suites: special-functions, solver-residual, zigzag, simulation, envelope, hessian.\n"
                 "CSV header: suite,passed,checks,failures,worst");

  auto* sim = app.add_subcommand("simulate", "random martingale transforms checked against B_min <= <|g|^p> <= B_max");
  add_common(sim, cfg);
  sim->add_option("--depth", cfg.depth, "dyadic depth of each pair (default 8)");
  sim->add_option("--seed", cfg.seed, "random seed (default 1)");
  sim->add_option("--samples", cfg.samples, "number of pairs (default 1000)");
  sim->footer("CSV header: index,x1,x2,x3,g_p_mean,b_max,b_min,admissible,within_bounds");

  auto* ext = app.add_subcommand("extremal", "self-similar extremal pair approaching B_max");
  add_common(ext, cfg);
  ext->add_option("--point", cfg.point, "(0,m,x3) for p >= 2 or (m,0,x3) for p < 2");
  ext->add_option("--eps", cfg.eps, "splitting parameter in (0, 1/4) (default 0.01)");
  ext->add_option("--depth", cfg.depth, "levels listed in CSV output (default 64)");
  ext->footer("CSV header: start,length,f,g");

  auto* env = app.add_subcommand("envelope", "grid least zigzag-concave majorant (max) or convex minorant (min)");
  add_common(env, cfg);
  which_opt(env);
  env->add_option("--box-l", cfg.box_l, "box half-width (default 4)");
  env->add_option("--grid-n", cfg.grid_n, "odd grid size (default 129)");
  env->add_option("--boundary", cfg.boundary, "pin_u_p, pin_closed_form or pin_h")
      ->check(CLI::IsMember({"pin_u_p", "pin_closed_form", "pin_h"}));
  env->add_option("--tol", cfg.tol, "relative sweep tolerance (default 1e-10)");
  env->footer("CSV header: x1,x2,value");

  auto* crit = app.add_subcommand("critical-c", "box-ladder search for the smallest c with a zigzag-concave majorant");
  add_common(crit, cfg);
  crit->add_option("--box-l", cfg.box_l, "half-width of the smaller box (default 32; the ladder doubles it)");
  crit->add_option("--grid-n", cfg.grid_n, "odd grid size of the smaller box (default 513)");
  crit->add_option("--tol", cfg.tol, "bisection width on c (default 0.02 beta)");
  crit->add_option("--c-lo", cfg.c_lo, "subcritical bracket end (default beta/2)");
  crit->add_option("--c-hi", cfg.c_hi, "supercritical bracket end (default 2 beta)");
  crit->footer("CSV header: c,value_small_box,value_large_box,growth,subcritical");

  auto* chords = app.add_subcommand("chords", "extremal trajectories in the rotated coordinates y1, y2, y3");
  add_common(chords, cfg);
  which_opt(chords);
  chords->add_option("--point", cfg.point, "x1,x2,x3; without it a fan of --grid-n chords is listed");
  chords->add_option("--grid-n", cfg.grid_n, "chords in the fan (default 9)");
  chords->footer("CSV header: case,omega,vertical,y1,y2,y3,u_y1,u_y2,u_y3,s_y1,s_y2,s_y3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& ch : msg) if (ch == '\n') ch = ' ';
    std::cerr << "error: " << msg << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  Output o;
  int code = 0;
  try {
    if (cfg.command == "eval") code = cmd_eval(cfg, o);
    else if (cfg.command == "scan") code = cmd_scan(cfg, o);
    else if (cfg.command == "verify") code = cmd_verify(cfg, o);
    else if (cfg.command == "simulate") code = cmd_simulate(cfg, o);
    else if (cfg.command == "extremal") code = cmd_extremal(cfg, o);
    else if (cfg.command == "envelope") code = cmd_envelope(cfg, o);
    else if (cfg.command == "critical-c") code = cmd_critical(cfg, o);
    else code = cmd_chords(cfg, o);
    write_output(cfg, o);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SectorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NoRootError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const StepSizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
