#include "nilcount/nilcount.h"

#include <cstring>
#include <json.hpp>
#include <new>
#include <string>

#include "nilcount/analysis.hpp"
#include "nilcount/config.hpp"
#include "nilcount/phase.hpp"
#include "nilcount/selftest.hpp"
#include "nilcount/spectral.hpp"

using nlohmann::json;
using namespace nilcount;

struct nc_config {
  Config config;
  Problem problem;
};

struct nc_sweep {
  SweepResult result;
};

namespace {

thread_local std::string last_error;

template <class F>
nc_status guard(F&& f) {
  last_error.clear();
  try {
    f();
    return NC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<nc_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return NC_BUDGET;
  } catch (const std::exception& e) {
    last_error = e.what();
    return NC_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return NC_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(Errc::invalid_argument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const json& j) { *out = dup(j.dump(2)); }

// Plain JSON numbers that are not integers give up exactness deliberately.
Rational rational_of(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(BigInt(j.get<std::int64_t>()));
  if (j.is_number_float()) return rational_from_double(j.get<double>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  fail(Errc::schema, path + ": expected a number or a \"p/q\" string");
}

std::optional<ExactElement> center_of(const char* text, const Problem& p) {
  if (!text || !*text) return std::nullopt;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::schema, std::string("center is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("x") || !j.contains("t") || !j["x"].is_array() || !j["t"].is_array())
    fail(Errc::schema, "center: expected {\"x\": [...], \"t\": [...]}");
  if (j["x"].size() != static_cast<size_t>(p.group.q()) || j["t"].size() != static_cast<size_t>(p.group.m()))
    fail(Errc::dimension_mismatch, "center: dimensions do not match the group");
  ExactElement g;
  for (size_t i = 0; i < j["x"].size(); ++i) g.x.push_back(rational_of(j["x"][i], "center.x[" + std::to_string(i) + "]"));
  for (size_t i = 0; i < j["t"].size(); ++i) g.t.push_back(rational_of(j["t"][i], "center.t[" + std::to_string(i) + "]"));
  return g;
}

void fill(nc_count_record* out, const CountRecord& r) {
  out->R = r.R;
  out->count = r.count;
  out->leading = r.leading;
  out->abs_error = r.abs_error;
  out->rel_discrepancy = r.rel_discrepancy;
  out->boundary_hits = r.boundary_hits;
  out->exact = r.exact ? 1 : 0;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

json table_json(const ExponentTable& t) {
  json c = json::array();
  for (const auto& x : t.candidates) c.push_back({{"tag", x.tag}, {"gamma1", x.gamma1}, {"gamma2", x.gamma2}});
  return {{"q", t.q},           {"m", t.m},
          {"alpha", t.alpha},   {"gamma1", t.gamma1},
          {"gamma2", t.gamma2}, {"tag", t.tag},
          {"sigma", t.sigma},   {"beta1", t.beta1},
          {"beta2", t.beta2},   {"candidates", c},
          {"shell_table", {{"gamma1", num(t.table_gamma1)}, {"gamma2", num(t.table_gamma2)}}}};
}

const char* fit_status(EnvelopeFit::Status s) {
  switch (s) {
    case EnvelopeFit::Status::ok: return "ok";
    case EnvelopeFit::Status::undefined: return "undefined";
    case EnvelopeFit::Status::zero: return "zero";
  }
  return "?";
}

json fit_json(const EnvelopeFit& f) {
  return {{"status", fit_status(f.status)},     {"slope", num(f.slope)},   {"intercept", num(f.intercept)},
          {"window_width", f.window_width},     {"windows", f.windows},    {"window_x", f.window_x},
          {"window_max", f.window_max}};
}

json part_json(const PoissonPart& p) {
  return {{"head", p.head}, {"tail", p.tail}, {"envelope_constant", p.envelope_constant}, {"decay", p.decay},
          {"terms", p.terms}};
}

json clause_json(const ClauseResult& c) {
  return {{"id", c.id},
          {"statement", c.statement},
          {"multiple", c.multiple},
          {"strict", c.strict},
          {"diagnostic", c.diagnostic},
          {"worst_ratio", num(c.worst_ratio)},
          {"worst_lambda", {c.worst_lambda1, c.worst_lambda2}},
          {"checked", c.checked},
          {"failed", c.failed},
          {"vacuous", c.vacuous},
          {"passed", c.passed()}};
}

json point_json(const CriticalPoint& p) {
  return {{"value", num(p.value)}, {"complement", num(p.complement)}, {"absent", p.absent}, {"residual", p.residual}};
}

}  // namespace

extern "C" {

const char* nc_version(void) { return "0.1.0"; }

const char* nc_status_name(nc_status s) {
  switch (s) {
    case NC_OK: return "ok";
    case NC_INVALID_ARGUMENT: return "invalid-argument";
    case NC_DIMENSION_MISMATCH: return "dimension-mismatch";
    case NC_SINGULAR: return "singular";
    case NC_DOMAIN: return "domain";
    case NC_BUDGET: return "budget";
    case NC_OVERFLOW: return "overflow";
    case NC_CONVERGENCE: return "convergence";
    case NC_SCHEMA: return "schema";
    case NC_IO: return "io";
    case NC_ASSERTION: return "assertion";
    case NC_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* nc_last_error(void) { return last_error.c_str(); }

void nc_string_free(char* s) { std::free(s); }

nc_status nc_config_load(const char* text_or_path, nc_config** out) {
  return guard([&] {
    need(text_or_path, "config text");
    need(out, "out");
    *out = nullptr;
    Config c = parse_config(text_or_path);
    Problem p = c.problem();
    *out = new nc_config{std::move(c), std::move(p)};
  });
}

void nc_config_free(nc_config* c) { delete c; }

nc_status nc_config_serialize(const nc_config* c, char** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    *out = dup(serialize_config(c->config));
  });
}

nc_status nc_config_dims(const nc_config* c, int* q, int* m, double* alpha) {
  return guard([&] {
    need(c, "config");
    if (q) *q = c->problem.group.q();
    if (m) *m = c->problem.group.m();
    if (alpha) *alpha = c->problem.alpha();
  });
}

nc_status nc_config_set_workers(nc_config* c, int workers) {
  return guard([&] {
    need(c, "config");
    if (workers < 1) fail(Errc::invalid_argument, "workers must be positive");
    c->config.run.workers = workers;
  });
}

nc_status nc_config_workers(const nc_config* c, int* workers) {
  return guard([&] {
    need(c, "config");
    need(workers, "out");
    *workers = c->config.run.workers;
  });
}

nc_status nc_config_set_seed(nc_config* c, uint64_t seed) {
  return guard([&] {
    need(c, "config");
    c->config.run.seed = seed;
  });
}

nc_status nc_config_seed(const nc_config* c, uint64_t* seed) {
  return guard([&] {
    need(c, "config");
    need(seed, "out");
    *seed = c->config.run.seed;
  });
}

nc_status nc_count(const nc_config* c, const char* radius, const char* center_json, nc_count_record* out) {
  return guard([&] {
    need(c, "config");
    need(radius, "radius");
    need(out, "out");
    const Radius R = Radius::parse(radius);
    const auto res = count_ball(c->problem, BallQuery{R, center_of(center_json, c->problem)}, c->config.counter_options());
    fill(out, make_record(c->problem, R.value(), res));
  });
}

nc_status nc_shell(const nc_config* c, const char* radius, const char* delta, const char* center_json, int64_t* count,
                   int* exact) {
  return guard([&] {
    need(c, "config");
    need(radius, "radius");
    need(delta, "delta");
    need(count, "out");
    const auto res = count_shell(c->problem, BallQuery{Radius::parse(radius), center_of(center_json, c->problem)},
                                 parse_rational(delta), c->config.counter_options());
    *count = res.count;
    if (exact) *exact = res.exact ? 1 : 0;
  });
}

nc_status nc_average_shell(const nc_config* c, const char* height, double R, double delta, double* out) {
  return guard([&] {
    need(c, "config");
    need(height, "height");
    need(out, "out");
    *out = average_shell_count(c->problem, parse_rational(height), R, delta, c->config.counter_options());
  });
}

nc_status nc_volume(const nc_config* c, double R, double* out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    if (!(R > 0)) fail(Errc::domain, "radius must be positive");
    *out = ball_volume(c->problem.norm, R);
  });
}

nc_status nc_volume_monte_carlo(const nc_config* c, uint64_t samples, uint64_t seed, double* estimate,
                                double* std_error) {
  return guard([&] {
    need(c, "config");
    need(estimate, "out");
    const auto mc = ball_volume_monte_carlo(c->problem.norm, samples, seed);
    *estimate = mc.estimate;
    if (std_error) *std_error = mc.std_error;
  });
}

nc_status nc_sweep_run(const nc_config* c, const double* radii, size_t n, nc_sweep** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    *out = nullptr;
    if (n && !radii) fail(Errc::invalid_argument, "radii is null");
    SweepOptions opt;
    opt.counter = c->config.counter_options();
    opt.max_fibres = c->config.run.max_fibres;
    *out = new nc_sweep{sweep(c->problem, std::vector<double>(radii, radii + n), opt)};
  });
}

size_t nc_sweep_size(const nc_sweep* s) { return s ? s->result.records.size() : 0; }

nc_status nc_sweep_record(const nc_sweep* s, size_t i, nc_count_record* out) {
  return guard([&] {
    need(s, "sweep");
    need(out, "out");
    if (i >= s->result.records.size()) fail(Errc::invalid_argument, "record index out of range");
    fill(out, s->result.records[i]);
  });
}

nc_status nc_sweep_summary(const nc_sweep* s, char** out) {
  return guard([&] {
    need(s, "sweep");
    need(out, "out");
    const auto& r = s->result;
    put(out, {{"fit", fit_json(r.fit)},
              {"predicted_slope", r.predicted_slope},
              {"verdict", verdict_name(r.verdict)},
              {"sharp_case", r.sharp_case},
              {"warning", r.warning},
              {"note", r.note},
              {"exponents", table_json(r.table)}});
  });
}

void nc_sweep_free(nc_sweep* s) { delete s; }

nc_status nc_predict(int q, int m, double alpha, char** out) {
  return guard([&] {
    need(out, "out");
    if (q < 2) fail(Errc::invalid_argument, "q must be at least 2");
    put(out, table_json(predicted_exponents(q, m, alpha)));
  });
}

nc_status nc_spectral(double alpha, int q, int m, double lambda1, double lambda2, const char* route, double tol,
                      nc_transform* out) {
  return guard([&] {
    need(out, "out");
    const Route r = route ? parse_route(route) : Route::automatic;
    const auto s = fourier_ball(alpha, q, m, {lambda1, lambda2, r}, tol > 0 ? tol : 1e-11);
    out->re = s.value.real();
    out->im = s.value.imag();
    out->error = s.error;
    out->route = s.route == Route::center ? 2 : 1;
  });
}

nc_status nc_spectral_oracle(double alpha, int q, int m, double lambda1, double lambda2, nc_transform* out) {
  return guard([&] {
    need(out, "out");
    if (q < 1 || m < 1) fail(Errc::invalid_argument, "q and m must be positive");
    std::vector<double> w(q, 0.0), s(m, 0.0);
    w[0] = lambda1 / (2 * std::numbers::pi);
    s[0] = lambda2 / (2 * std::numbers::pi);
    const auto o = fourier_oracle(alpha, q, m, w, s);
    out->re = o.value.real();
    out->im = o.value.imag();
    out->error = o.error;
    out->route = 0;
  });
}

nc_status nc_spectral_decay(double alpha, int q, int m, const char* ray, double lmin, double lmax, int n, int workers,
                            char** out) {
  return guard([&] {
    need(ray, "ray");
    need(out, "out");
    const Ray r = Ray::parse(ray);
    const auto grid = radius_grid(lmin, lmax, n);
    const auto f = decay_fit(alpha, q, m, r, grid, workers);
    json pts = json::array();
    for (size_t i = 0; i < f.lambda.size(); ++i)
      pts.push_back({{"lambda", f.lambda[i]}, {"magnitude", f.magnitude[i]}, {"on_envelope", static_cast<bool>(f.on_envelope[i])}});
    put(out, {{"ray", r.name()},
              {"alpha", alpha},
              {"q", q},
              {"m", m},
              {"predicted", {{"available", f.predicted.available}, {"exponent", f.predicted.exponent}, {"rule", f.predicted.rule}}},
              {"fit", fit_json(f.fit)},
              {"points", pts}});
  });
}

nc_status nc_phase_verify(double alpha, const char* regime, int samples, uint64_t seed, int grid, int workers,
                          char** out, int* passed) {
  return guard([&] {
    need(regime, "regime");
    need(out, "out");
    if (samples < 1 || grid < 2) fail(Errc::invalid_argument, "need samples >= 1 and grid >= 2");
    const PhaseRegime reg = parse_regime(regime);
    const auto lambdas = sample_lambdas(alpha, reg, samples, seed);
    const auto rep = verify_phase_lemmas(alpha, reg, lambdas, grid, workers);
    json clauses = json::array();
    for (const auto& c : rep.clauses) clauses.push_back(clause_json(c));
    const auto& pt = rep.points;
    put(out, {{"alpha", rep.alpha},
              {"regime", regime_name(rep.regime)},
              {"grid", rep.grid_n},
              {"samples", rep.samples},
              {"seed", seed},
              {"c_alpha", pt.c_alpha},
              {"r0", num(pt.r0)},
              {"R0", num(pt.R0)},
              {"r0_lo", point_json(pt.r0_lo)},
              {"r0_hi", point_json(pt.r0_hi)},
              {"R0_lo", point_json(pt.R0_lo)},
              {"R0_hi", point_json(pt.R0_hi)},
              {"d_alpha", num(rep.d_alpha)},
              {"d_alpha_prime", num(rep.d_alpha_prime)},
              {"clauses", clauses},
              {"passed", rep.passed}});
    if (passed) *passed = rep.passed ? 1 : 0;
  });
}

nc_status nc_lattice_check(const nc_config* c, char** out, int* is_sub) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    const auto cert = is_subgroup(c->problem.group, c->problem.lattice);
    json entries = json::array();
    for (const auto& e : cert.entries) {
      json row = {{"l", e.l}, {"i", e.i}, {"j", e.j}, {"value", e.value}, {"integral", e.integral}};
      if (e.exact_value) row["exact"] = to_string(*e.exact_value);
      entries.push_back(row);
    }
    const auto red = c->problem.reduced();
    const auto dr = delta_rational(red.Mt1, red.Mt2);
    json delta = {{"verdict", dr.verdict == DeltaRational::Verdict::found  ? "found"
                              : dr.verdict == DeltaRational::Verdict::none ? "none"
                                                                          : "unknown"},
                  {"reason", dr.reason}};
    if (dr.c) delta["c"] = to_string(*dr.c);
    json j = {{"is_subgroup", cert.is_subgroup},
              {"exact", cert.exact},
              {"covolume", c->problem.lattice.covolume()},
              {"entries", entries},
              {"delta_rational", delta}};
    if (cert.first_failure) j["first_failure"] = *cert.first_failure;
    put(out, j);
    if (is_sub) *is_sub = cert.is_subgroup ? 1 : 0;
  });
}

nc_status nc_sharpness(const nc_config* c, int n_max, char** out, int* ok) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    if (c->problem.alpha() != 2) fail(Errc::invalid_argument, "the sharpness probe needs alpha = 2");
    const auto red = c->problem.reduced();
    const auto dr = delta_rational(red.Mt1, red.Mt2);
    if (dr.verdict != DeltaRational::Verdict::found)
      fail(Errc::invalid_argument, "reduced matrix is not delta-rational: " + dr.reason);
    const ReducedSpec integral{red.Mt1.scaled(*dr.c), red.Mt2.scaled(*dr.c * *dr.c)};
    const auto rep = sharpness_probe_alpha2(integral, n_max, c->config.counter_options());
    json rows = json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"N", r.N}, {"count", r.count}, {"count_shifted", r.count_shifted}, {"volume_jump", r.volume_jump}});
    json j = {{"n_max", rep.n_max}, {"verified", rep.verified}, {"scale", to_string(*dr.c)}, {"ok", rep.ok()}, {"rows", rows}};
    if (rep.first_failure) j["first_failure"] = *rep.first_failure;
    put(out, j);
    if (ok) *ok = rep.ok() ? 1 : 0;
  });
}

nc_status nc_poisson(const nc_config* c, double R, double eps, double cap1, double cap2, char** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    PoissonOptions o;
    o.cap1 = cap1;
    o.cap2 = cap2;
    o.workers = c->config.run.workers;
    o.max_evaluations = c->config.run.poisson_max_evaluations;
    o.max_tail_ratio = c->config.run.poisson_max_tail_ratio;
    const auto e = poisson_estimate(c->problem, R, eps, o);
    auto side = [](const PoissonRadius& r) {
      return json{{"rho", r.rho}, {"S1", part_json(r.s1)}, {"S2", part_json(r.s2)}, {"S3", part_json(r.s3)}, {"total", r.total()}};
    };
    put(out, {{"label", "envelope estimate"},
              {"R", e.R},
              {"eps", e.eps},
              {"N", e.N},
              {"cap1", e.cap1},
              {"cap2", e.cap2},
              {"plus", side(e.plus)},
              {"minus", side(e.minus)},
              {"head", e.head},
              {"tail", e.tail},
              {"edge", e.edge},
              {"bound", e.bound},
              {"bound_unit_edge", e.bound_unit_edge},
              {"evaluations", e.evaluations},
              {"envelopes", {{"S1", e.env1}, {"S2", e.env2}, {"S3", num(e.env3)}}}});
  });
}

nc_status nc_selftest(int workers, char** out, int* passed) {
  return guard([&] {
    need(out, "out");
    const auto rep = selftest(workers < 1 ? 1 : workers);
    json cases = json::array();
    for (const auto& c : rep.cases)
      cases.push_back({{"name", c.name}, {"alpha", c.alpha}, {"radius", c.radius}, {"count", c.count},
                       {"naive", c.naive}, {"exact", c.exact}, {"ok", c.ok()}});
    put(out, {{"cases", cases}, {"passed", rep.passed()}});
    if (passed) *passed = rep.passed() ? 1 : 0;
  });
}

}  // extern "C"
