// heis: command-line front end for the library.
//
// Every subcommand reads an optional JSON config (--config), applies flag
// overrides on top, and writes its primary output to --out (a directory) or
// stdout. A run manifest goes to <out>/manifest.json, or stderr without --out.
// Exit codes: 0 pass, 1 assertion failure, 2 usage or input error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "heis/analysis.hpp"
#include "heis/limsup.hpp"
#include "heis/random.hpp"
#include "heis/rectangles.hpp"
#include "heis/splitting.hpp"
#include "heis/svf.hpp"

#ifndef HEIS_VERSION
#define HEIS_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace heis;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Options shared by all subcommands, plus the per-subcommand flag overrides.
struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::string config_path;
  std::string out_dir;
  std::vector<std::function<void(json&)>> overrides;
  bool uses_seed = false;
  std::function<int(Command&, json&)> run;

  // The config as merged, plus seed/workers when used. Filled by prepare().
  json cfg;
  std::uint64_t seed = 0;
  bool seed_from_entropy = false;
  int workers = 1;

  template <class T>
  CLI::Option* flag(const std::string& name, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    if constexpr (CLI::detail::is_mutable_container<T>::value) opt->delimiter(',');
    overrides.push_back([value, opt, key](json& j) {
      if (opt->count() > 0) j[json::json_pointer(key)] = *value;
    });
    return opt;
  }
};

void prepare(Command& c) {
  c.cfg = json::object();
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw UsageError("cannot read config " + c.config_path);
    try {
      in >> c.cfg;
    } catch (const json::exception& e) {
      throw UsageError("config " + c.config_path + ": " + e.what());
    }
    if (!c.cfg.is_object()) throw UsageError("config must be a JSON object");
  }
  for (auto& apply : c.overrides) apply(c.cfg);

  if (c.cfg.contains("workers")) {
    c.workers = c.cfg["workers"].get<int>();
  } else {
    c.workers = default_workers();
  }
  if (c.workers < 1) throw UsageError("workers must be positive");
  c.cfg["workers"] = c.workers;
  if (c.uses_seed) {
    if (c.cfg.contains("seed")) {
      c.seed = c.cfg["seed"].get<std::uint64_t>();
    } else {
      std::random_device rd;
      c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      c.seed_from_entropy = true;
    }
    c.cfg["seed"] = c.seed;
  }
}

// Output ------------------------------------------------------------------

/// Primary output file `file` in --out, or stdout.
void emit(const Command& c, const std::string& file, const std::string& content) {
  if (c.out_dir.empty()) {
    std::cout << content;
    return;
  }
  fs::create_directories(c.out_dir);
  std::ofstream out(fs::path(c.out_dir) / file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_manifest(const Command& c, int exit_code, double wall) {
  json m{{"subcommand", c.name},
         {"config", c.cfg},
         {"config_digest", hex(fnv1a(c.cfg.dump()))},
         {"workers", c.workers},
         {"version", HEIS_VERSION},
         {"wall_time_s", wall},
         {"exit_code", exit_code}};
  if (c.uses_seed) {
    m["seed"] = c.seed;
    m["seed_source"] = c.seed_from_entropy ? "entropy" : "config";
  }
  if (c.out_dir.empty()) {
    std::cerr << m.dump() << "\n";
  } else {
    fs::create_directories(c.out_dir);
    std::ofstream(fs::path(c.out_dir) / "manifest.json") << dump(m);
  }
}

// Config readers ------------------------------------------------------------

IsotropicFrame frame_of(const json& j, int n, int d) {
  const std::uint64_t fs = j.value("frame_seed", std::uint64_t{0});
  return fs == 0 ? canonical_frame(n, d) : random_isotropic_frame(n, d, fs);
}

Rectangle rectangle_of(const json& j) {
  if (j.contains("frame")) return rectangle_from_json(j);
  const int n = j.value("n", 1), d = j.value("d", 1);
  IsotropicFrame frame = frame_of(j, n, d);
  HPoint center(n);
  if (j.contains("center")) center = HPoint::from_coords(j.at("center").get<std::vector<double>>());
  if (center.dim() != n) throw std::invalid_argument("center must have 2n+1 coordinates");
  return Rectangle(parse_kind(j.value("kind", std::string("type1"))), std::move(frame), std::move(center),
                   j.at("r1").get<double>(), j.at("r2").get<double>());
}

AspectProfile profile_of(const json& j) {
  AspectProfile p;
  p.gamma1 = j.value("gamma1", 1.0);
  p.gamma2 = j.value("gamma2", 1.0);
  p.c1 = j.value("c1", 1.0);
  p.c2 = j.value("c2", 1.0);
  return p;
}

/// "scales" as an explicit list, or {"top", "ratio", "count"}.
std::vector<double> scales_of(const json& j) {
  if (j.contains("scales")) return j.at("scales").get<std::vector<double>>();
  const double top = j.value("scale_top", 1.0), ratio = j.value("scale_ratio", 0.5);
  const int count = j.value("scale_count", 4);
  if (!(ratio > 0.0 && ratio < 1.0) || count < 3) throw std::invalid_argument("need 0 < scale_ratio < 1 and scale_count >= 3");
  std::vector<double> s;
  for (int i = 0; i < count; ++i) s.push_back(top * std::pow(ratio, i));
  return s;
}

std::string report_csv(const ScalingReport& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Subcommands ---------------------------------------------------------------

int cmd_svf(Command& c, json& j) {
  const Kind kind = parse_kind(j.value("kind", std::string("type1")));
  const int n = j.value("n", 1), d = j.value("d", 1);
  const double r1 = j.at("r1").get<double>(), r2 = j.at("r2").get<double>();
  if (j.contains("t")) {
    emit(c, "svf.txt", num(svf_eval({kind, n, d, j["t"].get<double>(), r1, r2})) + "\n");
    return 0;
  }
  const int steps = j.value("grid", 64);
  if (steps < 1) throw std::invalid_argument("grid must be positive");
  const double Q = 2.0 * n + 2.0;
  std::vector<double> ts;
  for (int i = 0; i <= steps; ++i) ts.push_back(Q * i / steps);
  for (double b : svf_breakpoints(kind, n, d, aspect_of(r1, r2))) ts.push_back(b);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::ostringstream os;
  os << "t,phi\n";
  for (double t : ts) os << num(t) << "," << num(svf_eval({kind, n, d, t, r1, r2})) << "\n";
  emit(c, "svf.csv", os.str());
  return 0;
}

int cmd_predict(Command& c, json& j) {
  const PowerLawFamily f = family_from_json(j.contains("family") ? j["family"] : j);
  const double t0 = dimension_predict(f);
  json fam;
  to_json(fam, f);
  json out{{"family", fam}, {"predicted", t0}, {"aspect", to_string(asymptotic_aspect(f))}};
  if (c.out_dir.empty()) {
    std::cout << num(t0) << "\n";
  } else {
    emit(c, "predict.json", dump(out));
  }
  return 0;
}

int cmd_measure(Command& c, json& j) {
  const Rectangle R = rectangle_of(j);
  emit(c, "measure.txt", num(measure(R)) + "\n");
  return 0;
}

int cmd_cloud(Command& c, json& j) {
  const Rectangle R = rectangle_of(j);
  if (R.n() != 1) throw std::invalid_argument("cloud: only n = 1 is supported");
  const auto rows = point_cloud(R, j.value("count", std::size_t{20000}), c.seed);
  std::ostringstream os;
  write_cloud_csv(os, rows);
  emit(c, "cloud.csv", os.str());
  return 0;
}

/// Writes the report files and returns the exit code of the slope assertion.
int finish_scaling(Command& c, const json& j, ScalingReport rep, double default_tol) {
  if (j.contains("expect_slope")) rep.theory_slope = j["expect_slope"].get<double>();
  const double tol = j.value("tolerance", default_tol);
  const bool pass = rep.within(tol);
  json out;
  to_json(out, rep);
  out["tolerance"] = tol;
  out["pass"] = pass;
  if (c.out_dir.empty()) {
    std::cout << dump(out);
  } else {
    emit(c, "report.json", dump(out));
    emit(c, "report.csv", report_csv(rep));
  }
  std::cerr << (pass ? "PASS" : "FAIL") << ": slope " << num(rep.slope) << " +- " << num(rep.slope_stderr)
            << ", expected " << num(rep.theory_slope) << " +- " << num(tol) << "\n";
  return pass ? 0 : 1;
}

int cmd_verify_content(Command& c, json& j) {
  const Kind kind = parse_kind(j.value("kind", std::string("type1")));
  const ScalingReport rep =
      content_scaling(kind, j.value("n", 1), j.value("d", 1), profile_of(j), j.at("t").get<double>(),
                      scales_of(j), j.value("budget", std::size_t{200000}), c.seed, c.workers);
  return finish_scaling(c, j, rep, 0.15);
}

int cmd_verify_energy(Command& c, json& j) {
  const int n = j.value("n", 1), d = j.value("d", 1);
  const Rectangle unit(parse_kind(j.value("kind", std::string("type1"))), frame_of(j, n, d), HPoint(n), 1.0,
                       1.0);
  const ScalingReport rep = energy_scaling(unit, profile_of(j), j.at("t").get<double>(), scales_of(j),
                                           j.value("samples", std::size_t{1000000}), c.seed, c.workers);
  return finish_scaling(c, j, rep, 0.2);
}

int cmd_slice_check(Command& c, json& j) {
  const int n = j.value("n", 1), d = j.value("d", 1);
  const double r1 = j.at("r1").get<double>(), r2 = j.at("r2").get<double>();
  const HPoint p = HPoint::from_coords(j.at("p").get<std::vector<double>>());
  const double C = j.value("C", 10.0);
  const SliceCheck s =
      slice_measure_check(n, d, r1, r2, p, j.at("a").get<double>(), j.value("samples", std::size_t{200000}), c.seed);
  const bool pass = s.mc_measure <= C * s.bound;
  const json out{{"mc_measure", s.mc_measure},   {"error", s.error},   {"upper_confidence", s.upper_confidence},
                 {"bound", s.bound},             {"general_bound", s.general_bound},
                 {"improved", s.improved},       {"hits", s.hits},     {"samples", s.samples},
                 {"C", C},                       {"pass", pass}};
  emit(c, "slice.json", dump(out));
  return pass ? 0 : 1;
}

int cmd_simulate(Command& c, json& j) {
  SimConfig cfg = sim_config_from_json(j);
  cfg.seed = c.seed;
  cfg.workers = c.workers;
  const SimReport r = run_experiment(cfg);
  json out;
  to_json(out, r);
  std::ostringstream counts;
  write_counts_csv(counts, r);
  if (c.out_dir.empty()) {
    std::cout << dump(out);
  } else {
    emit(c, "report.json", dump(out));
    emit(c, "counts.csv", counts.str());
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "estimated dimension " << num(r.estimated_dimension) << " +- " << num(r.estimated_stderr)
            << ", predicted " << num(r.predicted) << "\n";
  return r.fit_valid ? 0 : 1;
}

// Wiring --------------------------------------------------------------------

void rect_flags(Command& c, bool with_dims = true) {
  c.flag<std::string>("--kind", "/kind", "type1, type2 or euclidean");
  if (with_dims) {
    c.flag<int>("--n", "/n", "dimension n of H^n");
    c.flag<int>("--d", "/d", "dimension of the horizontal subspace");
  }
  c.flag<double>("--r1", "/r1", "horizontal radius");
  c.flag<double>("--r2", "/r2", "vertical radius");
}

void profile_flags(Command& c) {
  c.flag<std::string>("--kind", "/kind", "type1 or type2");
  c.flag<int>("--n", "/n", "dimension n of H^n");
  c.flag<int>("--d", "/d", "dimension of the horizontal subspace");
  c.flag<double>("--t", "/t", "exponent t");
  c.flag<double>("--gamma1", "/gamma1", "r1(s) = c1 s^gamma1");
  c.flag<double>("--gamma2", "/gamma2", "r2(s) = c2 s^gamma2");
  c.flag<double>("--c1", "/c1", "");
  c.flag<double>("--c2", "/c2", "");
  c.flag<std::vector<double>>("--scales", "/scales", "explicit decreasing scales");
  c.flag<double>("--scale-top", "/scale_top", "largest scale (default 1)");
  c.flag<double>("--scale-ratio", "/scale_ratio", "ratio of successive scales (default 1/2)");
  c.flag<int>("--scale-count", "/scale_count", "number of scales (default 4)");
  c.flag<double>("--tolerance", "/tolerance", "allowed |slope - expected|");
  c.flag<double>("--expect-slope", "/expect_slope", "assert this slope instead of the theory slope");
  c.flag<std::uint64_t>("--frame-seed", "/frame_seed", "random isotropic frame (0: canonical)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rectangles, singular value functions and limsup sets in the Heisenberg group"};
  app.set_version_flag("--version", HEIS_VERSION);
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const char* name, const char* help, bool seeded, auto run) -> Command& {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->app = app.add_subcommand(name, help);
    c->uses_seed = seeded;
    c->run = run;
    c->app->add_option("--config", c->config_path, "JSON config; flags override its keys");
    c->app->add_option("--out", c->out_dir, "output directory (default: stdout)");
    c->flag<int>("--workers", "/workers", "worker threads (default: HEIS_WORKERS or 1)");
    if (seeded) c->flag<std::uint64_t>("--seed", "/seed", "base seed (default: drawn from entropy)");
    commands.push_back(std::move(c));
    return *commands.back();
  };

  Command& svf = add("svf", "evaluate Phi^t, or tabulate it over t as CSV", false, cmd_svf);
  rect_flags(svf);
  svf.flag<double>("--t", "/t", "single t; omit for a table over [0, 2n+2]");
  svf.flag<int>("--grid", "/grid", "table steps (breakpoints are added exactly)");

  Command& predict = add("predict", "predicted dimension of the limsup set", false, cmd_predict);
  predict.flag<std::string>("--kind", "/kind", "type1, type2 or euclidean");
  predict.flag<int>("--n", "/n", "dimension n of H^n");
  predict.flag<int>("--d", "/d", "dimension of the horizontal subspace");
  predict.flag<double>("--alpha1", "/alpha1", "r1,k = c1 k^-alpha1");
  predict.flag<double>("--alpha2", "/alpha2", "r2,k = c2 k^-alpha2");
  predict.flag<double>("--c1", "/c1", "");
  predict.flag<double>("--c2", "/c2", "");

  Command& meas = add("measure", "exact Lebesgue measure of a rectangle", false, cmd_measure);
  rect_flags(meas);

  Command& cloud = add("cloud", "CSV point cloud of a rectangle in H^1", true, cmd_cloud);
  rect_flags(cloud, false);
  cloud.flag<std::vector<double>>("--center", "/center", "x,y,z");
  cloud.flag<std::size_t>("--count", "/count", "number of box samples");
  cloud.flag<std::uint64_t>("--frame-seed", "/frame_seed", "random isotropic frame (0: canonical)");

  Command& content = add("verify-content", "content scaling slope against theory", true, cmd_verify_content);
  profile_flags(content);
  content.flag<std::size_t>("--budget", "/budget", "samples per scale");

  Command& energy = add("verify-energy", "energy scaling slope against theory", true, cmd_verify_energy);
  profile_flags(energy);
  energy.flag<std::size_t>("--samples", "/samples", "samples per scale");

  Command& slice = add("slice-check", "slice measure against its analytic bound", true, cmd_slice_check);
  slice.flag<int>("--n", "/n", "dimension n of H^n");
  slice.flag<int>("--d", "/d", "dimension of the horizontal subspace");
  slice.flag<double>("--r1", "/r1", "");
  slice.flag<double>("--r2", "/r2", "");
  slice.flag<std::vector<double>>("--p", "/p", "point x...,y...,z");
  slice.flag<double>("--a", "/a", "slice radius");
  slice.flag<double>("--C", "/C", "allowed constant (default 10)");
  slice.flag<std::size_t>("--samples", "/samples", "");

  Command& sim = add("simulate", "finite-stage limsup simulation", true, cmd_simulate);
  sim.flag<std::string>("--kind", "/family/kind", "type1, type2 or euclidean");
  sim.flag<int>("--n", "/family/n", "dimension n of H^n");
  sim.flag<int>("--d", "/family/d", "dimension of the horizontal subspace");
  sim.flag<double>("--alpha1", "/family/alpha1", "");
  sim.flag<double>("--alpha2", "/family/alpha2", "");
  sim.flag<double>("--c1", "/family/c1", "");
  sim.flag<double>("--c2", "/family/c2", "");
  sim.flag<std::uint64_t>("--stage-start", "/stage_start", "first stage N");
  sim.flag<std::uint64_t>("--stage-end", "/stage_end", "last stage M");
  sim.flag<std::size_t>("--points-per-rect", "/points_per_rect", "");
  sim.flag<std::uint64_t>("--frame-seed", "/frame_seed", "random isotropic frame (0: canonical)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (auto& c : commands) {
    if (!c->app->parsed()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    int rc = 0;
    try {
      prepare(*c);
      json work = c->cfg;
      rc = c->run(*c, work);
    } catch (const UsageError& e) {
      std::cerr << "heis " << c->name << ": " << e.what() << "\n";
      return 2;
    } catch (const std::invalid_argument& e) {
      std::cerr << "heis " << c->name << ": " << e.what() << "\n";
      return 2;
    } catch (const json::exception& e) {
      std::cerr << "heis " << c->name << ": bad or missing config value: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "heis " << c->name << ": " << e.what() << "\n";
      return 1;
    }
    write_manifest(*c, rc, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return rc;
  }
  return 2;
}
