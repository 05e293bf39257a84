#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "nilcount/nilcount.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kUsage = 1, kAssert = 2;

struct Failure {
  int code;
  std::string message;
};

void check(nc_status s, const char* what) {
  if (s != NC_OK) throw Failure{kUsage, std::string(what) + ": " + nc_status_name(s) + ": " + nc_last_error()};
}

json take(char* s) {
  auto j = json::parse(s);
  nc_string_free(s);
  return j;
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string text() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
      for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

class Output {
 public:
  std::string dir;
  std::string command;
  std::vector<std::string> argv;
  std::string config_text;

  // With --out the artefact is written to disk; otherwise the primary one goes to stdout.
  void emit(const std::string& name, const std::string& body, bool primary) {
    if (dir.empty()) {
      if (primary) std::cout << body << (body.empty() || body.back() == '\n' ? "" : "\n");
      return;
    }
    fs::create_directories(dir);
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Failure{kUsage, "cannot write " + (fs::path(dir) / name).string()};
    f << body;
    files_.push_back({{"name", name}, {"fnv1a", fnv1a(body)}, {"bytes", body.size()}});
  }

  void finish(int exit_code) {
    if (dir.empty()) return;
    json m = {{"command", command},
              {"argv", argv},
              {"version", nc_version()},
              {"exit_code", exit_code},
              {"files", files_}};
    if (!config_text.empty()) {
      m["config"] = json::parse(config_text);
      m["config_hash"] = fnv1a(config_text);
    }
    std::ofstream f(fs::path(dir) / "manifest.json");
    f << m.dump(2) << "\n";
    std::cerr << "wrote " << files_.size() << " file(s) and manifest.json to " << dir << "\n";
  }

 private:
  json files_ = json::array();
};

struct ConfigHandle {
  nc_config* c = nullptr;
  ~ConfigHandle() { nc_config_free(c); }
};

const char* kDefaultConfig = R"({"group":{"builtin":"heisenberg","d":1},"norm":{"alpha":2},"lattice":"identity"})";

std::vector<double> grid(double lo, double hi, int n, bool linear) {
  if (!(lo > 0) || !(hi > lo) || n < 2) throw Failure{kUsage, "grid needs 0 < min < max and at least 2 points"};
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    g[i] = linear ? lo + (hi - lo) * f : lo * std::pow(hi / lo, f);
  }
  g.back() = hi;
  return g;
}

std::string gnuplot(const std::string& csv, const std::string& title, const std::string& xcol, const std::string& ycol,
                    const json& fit, const std::string& xlabel, const std::string& ylabel) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set key top left\n"
     << "set title '" << title << "'\n"
     << "set xlabel '" << xlabel << "'\n"
     << "set ylabel '" << ylabel << "'\n";
  if (fit.contains("status") && fit["status"] == "ok") {
    os << "slope = " << fmt(fit["slope"].get<double>()) << "\n"
       << "icpt = " << fmt(fit["intercept"].get<double>()) << "\n"
       << "plot '" << csv << "' using " << xcol << ":" << ycol << " skip 1 with points pt 7 ps 0.5 title 'data', \\\n"
       << "     exp(icpt) * x**slope with lines title sprintf('envelope slope %.3f', slope)\n";
  } else {
    os << "plot '" << csv << "' using " << xcol << ":" << ycol << " skip 1 with points pt 7 ps 0.5 title 'data'\n";
  }
  return os.str();
}

int env_workers() {
  const char* w = std::getenv("NILCOUNT_WORKERS");
  if (!w || !*w) return 0;
  char* end = nullptr;
  long v = std::strtol(w, &end, 10);
  if (*end || v < 1 || v > 4096) throw Failure{kUsage, "NILCOUNT_WORKERS must be a positive integer"};
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice points in homogeneous-norm balls on step-two nilpotent groups"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nc_version()));

  std::string config_arg, out_dir;
  int workers = 0;
  long long seed = -1;
  app.add_option("--config", config_arg, "JSON config file or inline JSON (default: H^1, alpha 2, identity lattice)");
  app.add_option("--out", out_dir, "write outputs and manifest.json into this directory");
  app.add_option("--workers", workers, "worker threads (overrides NILCOUNT_WORKERS and the config)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed (overrides the config)")->check(CLI::NonNegativeNumber);

  std::string radius = "1", center, delta = "1/2", height = "4", eps = "auto", regime = "case-i", route = "auto",
              ray;
  double rmin = 10, rmax = 200, lambda1 = 0, lambda2 = 0, lmin = 10, lmax = 500, cap1 = 16, cap2 = 4, alpha = 2,
         radius_d = 20;
  int points = 40, q = 2, m = 1, samples = 50, grid_n = 10000, nmax = 100;
  long long mc = 0;
  bool linear = false, fit_flag = false, oracle = false;

  auto* count = app.add_subcommand("count", "count lattice points in a ball");
  count->add_option("--radius", radius, "radius: 2, 3/2, 2.5 or sqrt(9/2)")->required();
  count->add_option("--center", center, "ball centre as {\"x\":[...],\"t\":[...]}");

  auto* sweep = app.add_subcommand("sweep", "discrepancy over a radius grid");
  sweep->add_option("--rmin", rmin)->check(CLI::PositiveNumber);
  sweep->add_option("--rmax", rmax)->check(CLI::PositiveNumber);
  sweep->add_option("--points", points)->check(CLI::Range(1, 100000));
  sweep->add_flag("--linear", linear, "linear instead of geometric spacing");
  sweep->add_flag("--fit", fit_flag, "print the envelope fit");

  auto* predict = app.add_subcommand("predict", "predicted discrepancy exponents");
  predict->add_option("--q", q)->required();
  predict->add_option("--m", m)->required();
  predict->add_option("--alpha", alpha)->required();

  auto* spectral = app.add_subcommand("spectral", "transform of the unit ball: a value or a decay fit along a ray");
  spectral->add_option("--alpha", alpha);
  spectral->add_option("--q", q);
  spectral->add_option("--m", m);
  spectral->add_option("--lambda1", lambda1);
  spectral->add_option("--lambda2", lambda2);
  spectral->add_option("--route", route, "auto, first-layer or center");
  spectral->add_flag("--oracle", oracle, "also evaluate the direct quadrature reference");
  spectral->add_option("--ray", ray, "w-axis, s-axis, diagonal or fixed-ratio(r): fit the decay instead");
  spectral->add_option("--lmin", lmin);
  spectral->add_option("--lmax", lmax);
  spectral->add_option("--points", points);

  auto* phase = app.add_subcommand("phase", "phase-function lemmas");
  auto* verify = phase->add_subcommand("verify", "check every clause on random lambdas");
  phase->require_subcommand(1);
  verify->add_option("--alpha", alpha)->required();
  verify->add_option("--regime", regime, "case-i or case-ii")->required();
  verify->add_option("--samples", samples)->check(CLI::PositiveNumber);
  verify->add_option("--grid", grid_n)->check(CLI::Range(2, 100000000));

  auto* lattice = app.add_subcommand("lattice-check", "subgroup certificate and delta-rationality");
  auto* sharp = app.add_subcommand("sharpness", "count(sqrt N) = count(sqrt(N + 1/2)) for alpha = 2, m = 1");
  sharp->add_option("--nmax", nmax)->check(CLI::PositiveNumber);

  auto* shell = app.add_subcommand("shell", "lattice points with R - delta < N <= R + delta");
  shell->add_option("--radius", radius)->required();
  shell->add_option("--delta", delta);
  shell->add_option("--center", center);

  auto* avg = app.add_subcommand("average-shell", "shell counts averaged over centres in the truncated lattice");
  avg->add_option("--height", height, "truncation height T");
  avg->add_option("--radius", radius_d)->required();
  avg->add_option("--delta", delta);

  auto* poisson = app.add_subcommand("poisson", "dual-sum envelope estimate of the relative discrepancy");
  poisson->add_option("--radius", radius_d)->required();
  poisson->add_option("--eps", eps, "mollifier width or 'auto' (1/R)");
  poisson->add_option("--cap1", cap1, "cap on |k'|");
  poisson->add_option("--cap2", cap2, "cap on |k''|");
  double max_tail_ratio = -1;
  poisson->add_option("--max-tail-ratio", max_tail_ratio, "accepted tail / head ratio (overrides the config)")
      ->check(CLI::PositiveNumber);

  auto* volume = app.add_subcommand("volume", "ball volume");
  volume->add_option("--radius", radius_d);
  volume->add_option("--mc", mc, "also a Monte Carlo estimate with this many samples");

  auto* self = app.add_subcommand("selftest", "kernel counts against brute-force enumeration, R <= 4");

  radius_d = 0;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return kUsage;
  }

  Output out;
  out.dir = out_dir;
  for (int i = 1; i < argc; ++i) out.argv.emplace_back(argv[i]);
  int code = kOk;
  try {
    ConfigHandle cfg;
    check(nc_config_load(config_arg.empty() ? kDefaultConfig : config_arg.c_str(), &cfg.c), "config");
    if (max_tail_ratio > 0) {
      char* t = nullptr;
      check(nc_config_serialize(cfg.c, &t), "config");
      json j = take(t);
      j["run"]["poisson_max_tail_ratio"] = max_tail_ratio;
      nc_config_free(cfg.c);
      cfg.c = nullptr;
      check(nc_config_load(j.dump().c_str(), &cfg.c), "config");
    }
    if (int w = workers ? workers : env_workers()) check(nc_config_set_workers(cfg.c, w), "workers");
    if (seed >= 0) check(nc_config_set_seed(cfg.c, static_cast<std::uint64_t>(seed)), "seed");
    int w = 1;
    std::uint64_t s = 1;
    check(nc_config_workers(cfg.c, &w), "workers");
    check(nc_config_seed(cfg.c, &s), "seed");
    char* ctext = nullptr;
    check(nc_config_serialize(cfg.c, &ctext), "config");
    out.config_text = ctext;
    nc_string_free(ctext);
    int cq = 0, cm = 0;
    double calpha = 0;
    check(nc_config_dims(cfg.c, &cq, &cm, &calpha), "config");

    auto record_json = [](const nc_count_record& r) {
      return json{{"R", r.R},
                  {"count", r.count},
                  {"volume", r.leading},
                  {"abs_err", r.abs_error},
                  {"rel_disc", r.rel_discrepancy},
                  {"boundary_hits", r.boundary_hits},
                  {"exact", r.exact != 0}};
    };

    if (count->parsed()) {
      out.command = "count";
      nc_count_record r{};
      check(nc_count(cfg.c, radius.c_str(), center.empty() ? nullptr : center.c_str(), &r), "count");
      json j = record_json(r);
      j["radius"] = radius;
      out.emit("count.json", j.dump(2) + "\n", true);
    } else if (sweep->parsed()) {
      out.command = "sweep";
      const auto radii = points == 1 ? std::vector<double>{rmin} : grid(rmin, rmax, points, linear);
      nc_sweep* sw = nullptr;
      check(nc_sweep_run(cfg.c, radii.data(), radii.size(), &sw), "sweep");
      Csv csv{{"R", "count", "volume", "abs_err", "rel_disc"}, {}};
      for (size_t i = 0; i < nc_sweep_size(sw); ++i) {
        nc_count_record r{};
        nc_sweep_record(sw, i, &r);
        csv.rows.push_back({fmt(r.R), std::to_string(r.count), fmt(r.leading), fmt(r.abs_error), fmt(r.rel_discrepancy)});
      }
      char* sj = nullptr;
      const nc_status st = nc_sweep_summary(sw, &sj);
      nc_sweep_free(sw);
      check(st, "sweep");
      json summary = take(sj);
      out.emit("sweep.csv", csv.text(), true);
      out.emit("sweep_fit.json", summary.dump(2) + "\n", false);
      out.emit("sweep.gp", gnuplot("sweep.csv", "|count - volume| against R", "1", "4", summary["fit"], "R", "|count - volume|"),
               false);
      if (fit_flag && out.dir.empty()) std::cout << summary.dump(2) << "\n";
      if (summary["warning"].get<bool>()) std::cerr << "warning: " << summary["note"].get<std::string>() << "\n";
    } else if (predict->parsed()) {
      out.command = "predict";
      char* js = nullptr;
      check(nc_predict(q, m, alpha, &js), "predict");
      out.emit("predict.json", take(js).dump(2) + "\n", true);
    } else if (spectral->parsed()) {
      out.command = "spectral";
      if (!ray.empty()) {
        char* js = nullptr;
        check(nc_spectral_decay(alpha, q, m, ray.c_str(), lmin, lmax, points, w, &js), "spectral");
        json j = take(js);
        Csv csv{{"lambda", "magnitude", "on_envelope"}, {}};
        for (const auto& p : j["points"])
          csv.rows.push_back({fmt(p["lambda"].get<double>()), fmt(p["magnitude"].get<double>()), p["on_envelope"].get<bool>() ? "1" : "0"});
        json summary = j;
        summary.erase("points");
        out.emit("spectral.csv", csv.text(), true);
        out.emit("spectral_fit.json", summary.dump(2) + "\n", false);
        out.emit("spectral.gp",
                 gnuplot("spectral.csv", "transform magnitude along " + j["ray"].get<std::string>(), "1", "2", j["fit"],
                         "lambda", "|transform|"),
                 false);
        if (out.dir.empty()) std::cerr << summary.dump(2) << "\n";
      } else {
        nc_transform t{};
        check(nc_spectral(alpha, q, m, lambda1, lambda2, route.c_str(), 1e-11, &t), "spectral");
        json j = {{"alpha", alpha}, {"q", q}, {"m", m}, {"lambda1", lambda1}, {"lambda2", lambda2},
                  {"re", t.re}, {"im", t.im}, {"error", t.error}, {"route", t.route == 2 ? "center" : "first-layer"}};
        if (oracle) {
          nc_transform o{};
          check(nc_spectral_oracle(alpha, q, m, lambda1, lambda2, &o), "oracle");
          j["oracle"] = {{"re", o.re}, {"im", o.im}, {"error", o.error}};
        }
        out.emit("spectral.json", j.dump(2) + "\n", true);
      }
    } else if (verify->parsed()) {
      out.command = "phase verify";
      char* js = nullptr;
      int ok = 0;
      check(nc_phase_verify(alpha, regime.c_str(), samples, s, grid_n, w, &js, &ok), "phase");
      out.emit("phase.json", take(js).dump(2) + "\n", true);
      if (!ok) code = kAssert;
    } else if (lattice->parsed()) {
      out.command = "lattice-check";
      char* js = nullptr;
      int ok = 0;
      check(nc_lattice_check(cfg.c, &js, &ok), "lattice-check");
      out.emit("lattice.json", take(js).dump(2) + "\n", true);
      if (!ok) code = kAssert;
    } else if (sharp->parsed()) {
      out.command = "sharpness";
      char* js = nullptr;
      int ok = 0;
      check(nc_sharpness(cfg.c, nmax, &js, &ok), "sharpness");
      json j = take(js);
      Csv csv{{"N", "count", "count_shifted", "volume_jump"}, {}};
      for (const auto& r : j["rows"])
        csv.rows.push_back({std::to_string(r["N"].get<int>()), std::to_string(r["count"].get<long long>()),
                            std::to_string(r["count_shifted"].get<long long>()), fmt(r["volume_jump"].get<double>())});
      json summary = j;
      summary.erase("rows");
      out.emit("sharpness.json", summary.dump(2) + "\n", true);
      out.emit("sharpness.csv", csv.text(), false);
      if (!ok) code = kAssert;
    } else if (shell->parsed()) {
      out.command = "shell";
      std::int64_t n = 0;
      int exact = 0;
      check(nc_shell(cfg.c, radius.c_str(), delta.c_str(), center.empty() ? nullptr : center.c_str(), &n, &exact), "shell");
      out.emit("shell.json", json{{"radius", radius}, {"delta", delta}, {"count", n}, {"exact", exact != 0}}.dump(2) + "\n", true);
    } else if (avg->parsed()) {
      out.command = "average-shell";
      const double d = std::stod(delta.find('/') == std::string::npos
                                     ? delta
                                     : std::to_string(std::stod(delta.substr(0, delta.find('/'))) /
                                                      std::stod(delta.substr(delta.find('/') + 1))));
      double v = 0;
      check(nc_average_shell(cfg.c, height.c_str(), radius_d, d, &v), "average-shell");
      out.emit("average_shell.json",
               json{{"height", height}, {"radius", radius_d}, {"delta", d}, {"average", v}}.dump(2) + "\n", true);
    } else if (poisson->parsed()) {
      out.command = "poisson";
      const double e = eps == "auto" ? 1 / radius_d : std::stod(eps);
      char* js = nullptr;
      check(nc_poisson(cfg.c, radius_d, e, cap1, cap2, &js), "poisson");
      json j = take(js);
      nc_count_record r{};
      std::ostringstream rs;
      rs.precision(17);
      rs << radius_d;
      check(nc_count(cfg.c, rs.str().c_str(), nullptr, &r), "count");
      j["measured_rel_disc"] = r.rel_discrepancy;
      out.emit("poisson.json", j.dump(2) + "\n", true);
    } else if (volume->parsed()) {
      out.command = "volume";
      const double R = radius_d > 0 ? radius_d : 1;
      double v = 0;
      check(nc_volume(cfg.c, R, &v), "volume");
      json j = {{"radius", R}, {"volume", v}};
      if (mc > 0) {
        double est = 0, se = 0;
        check(nc_volume_monte_carlo(cfg.c, static_cast<std::uint64_t>(mc), s, &est, &se), "volume");
        const double scale = std::pow(R, cq + 2 * cm);
        j["monte_carlo"] = {{"samples", mc}, {"seed", s}, {"estimate", est * scale}, {"std_error", se * scale},
                            {"z", se > 0 ? (est * scale - v) / (se * scale) : 0.0}};
      }
      out.emit("volume.json", j.dump(2) + "\n", true);
    } else if (self->parsed()) {
      out.command = "selftest";
      char* js = nullptr;
      int ok = 0;
      check(nc_selftest(w, &js, &ok), "selftest");
      json j = take(js);
      Csv csv{{"name", "alpha", "radius", "count", "naive", "ok"}, {}};
      for (const auto& c : j["cases"])
        csv.rows.push_back({c["name"].get<std::string>(), fmt(c["alpha"].get<double>()), c["radius"].get<std::string>(),
                            std::to_string(c["count"].get<long long>()), std::to_string(c["naive"].get<long long>()),
                            c["ok"].get<bool>() ? "1" : "0"});
      out.emit("selftest.csv", csv.text(), true);
      std::cerr << "selftest: " << j["cases"].size() << " cases, " << (ok ? "all agree" : "MISMATCH") << "\n";
      if (!ok) code = kAssert;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    code = f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kUsage;
  }
  try {
    out.finish(code);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (code == kOk) code = kUsage;
  }
  return code;
}
