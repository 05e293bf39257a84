#include "nilcount/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace nilcount {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema(const std::string& path, const std::string& what) { fail(Errc::schema, path + ": " + what); }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) schema(path + "." + it.key(), "unknown field");
}

struct Entry {
  Rational exact;
  double value = 0;
  bool is_exact = true;
};

Entry entry(const json& j, const std::string& path) {
  Entry e;
  if (j.is_number_integer()) {
    e.exact = j.is_number_unsigned() ? Rational(BigInt(j.get<std::uint64_t>())) : Rational(BigInt(j.get<std::int64_t>()));
    e.value = to_double(e.exact);
  } else if (j.is_number_float()) {
    e.value = j.get<double>();
    e.is_exact = false;
    if (!std::isfinite(e.value)) schema(path, "entry is not finite");
  } else if (j.is_string()) {
    try {
      e.exact = parse_rational(j.get<std::string>());
    } catch (const Error& err) {
      schema(path, err.what());
    }
    e.value = to_double(e.exact);
  } else {
    schema(path, "expected a number or a \"p/q\" string");
  }
  return e;
}

Matrix matrix(const json& j, const std::string& path, std::optional<size_t> n = std::nullopt) {
  if (!j.is_array() || j.empty()) schema(path, "expected a non-empty array of rows");
  const size_t rows = j.size();
  if (n && rows != *n) schema(path, "expected " + std::to_string(*n) + " rows, got " + std::to_string(rows));
  std::vector<Entry> es;
  size_t cols = 0;
  for (size_t i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) schema(rp, "expected an array");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols || cols != rows) schema(rp, "matrix must be square with " + std::to_string(rows) + " columns");
    for (size_t c = 0; c < cols; ++c) es.push_back(entry(j[i][c], rp + "[" + std::to_string(c) + "]"));
  }
  bool exact = true;
  for (const auto& e : es) exact = exact && e.is_exact;
  if (exact) {
    std::vector<Rational> v;
    for (auto& e : es) v.push_back(e.exact);
    return Matrix::from_rationals(rows, cols, std::move(v));
  }
  std::vector<double> v;
  for (auto& e : es) v.push_back(e.value);
  return Matrix::from_doubles(rows, cols, std::move(v));
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (size_t i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (size_t c = 0; c < M.cols(); ++c) {
      if (!M.is_exact()) {
        row.push_back(M(i, c));
      } else {
        const Rational& r = M.exact(i, c);
        const BigInt& num = numerator(r);
        if (denominator(r) == 1 && num >= std::numeric_limits<std::int64_t>::min() &&
            num <= std::numeric_limits<std::int64_t>::max())
          row.push_back(static_cast<std::int64_t>(num));
        else
          row.push_back(to_string(r));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

int positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1 || j.get<std::int64_t>() > 1000000)
    schema(path, "expected a positive integer");
  return j.get<int>();
}

double positive_number(const json& j, const std::string& path) {
  if (!j.is_number() || !(j.get<double>() > 0)) schema(path, "expected a positive number");
  return j.get<double>();
}

GroupSection group(const json& j) {
  if (!j.is_object()) schema("group", "expected an object");
  GroupSection g;
  if (j.contains("builtin")) {
    if (!j["builtin"].is_string()) schema("group.builtin", "expected a string");
    g.builtin = j["builtin"].get<std::string>();
    if (g.builtin == "heisenberg" || g.builtin == "polarized_heisenberg") {
      only_keys(j, "group", {"builtin", "d"});
      if (!j.contains("d")) schema("group.d", "required for " + g.builtin);
      g.d = positive_int(j["d"], "group.d");
    } else if (g.builtin == "free_carnot") {
      only_keys(j, "group", {"builtin", "q"});
      if (!j.contains("q")) schema("group.q", "required for free_carnot");
      g.q = positive_int(j["q"], "group.q");
    } else if (g.builtin == "h_type") {
      only_keys(j, "group", {"builtin", "U"});
      if (!j.contains("U") || !j["U"].is_array() || j["U"].empty()) schema("group.U", "expected a non-empty list of matrices");
      for (size_t l = 0; l < j["U"].size(); ++l) g.U.push_back(matrix(j["U"][l], "group.U[" + std::to_string(l) + "]"));
    } else {
      schema("group.builtin", "unknown builtin '" + g.builtin + "' (heisenberg, polarized_heisenberg, free_carnot, h_type)");
    }
    return g;
  }
  only_keys(j, "group", {"q", "m", "U"});
  for (const char* k : {"q", "m", "U"})
    if (!j.contains(k)) schema(std::string("group.") + k, "required for an explicit group");
  g.q = positive_int(j["q"], "group.q");
  g.m = positive_int(j["m"], "group.m");
  if (!j["U"].is_array() || j["U"].size() != static_cast<size_t>(g.m))
    schema("group.U", "expected " + std::to_string(g.m) + " matrices");
  for (int l = 0; l < g.m; ++l) g.U.push_back(matrix(j["U"][l], "group.U[" + std::to_string(l) + "]", g.q));
  return g;
}

GroupSpec build_group(const GroupSection& g) {
  if (g.builtin == "heisenberg") return builtin::heisenberg(g.d);
  if (g.builtin == "polarized_heisenberg") return builtin::polarized_heisenberg(g.d);
  if (g.builtin == "free_carnot") return builtin::free_carnot(g.q);
  if (g.builtin == "h_type") return builtin::h_type(g.U);
  return GroupSpec(g.q, g.m, g.U);
}

json group_json(const GroupSection& g) {
  json j;
  if (!g.builtin.empty()) j["builtin"] = g.builtin;
  if (g.builtin == "heisenberg" || g.builtin == "polarized_heisenberg") j["d"] = g.d;
  if (g.builtin == "free_carnot") j["q"] = g.q;
  if (g.builtin.empty()) {
    j["q"] = g.q;
    j["m"] = g.m;
  }
  if (g.builtin.empty() || g.builtin == "h_type") {
    j["U"] = json::array();
    for (const auto& u : g.U) j["U"].push_back(matrix_json(u));
  }
  return j;
}

template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::schema) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace

Problem Config::problem() const {
  GroupSpec g = with_path("group", [&] { return build_group(group); });
  const int q = g.q(), m = g.m();
  NormParams norm = with_path("norm", [&] {
    return NormParams(alpha, M1 ? *M1 : Matrix::identity(q), M2 ? *M2 : Matrix::identity(m));
  });
  LatticeSpec L = with_path("lattice", [&] {
    switch (lattice.kind) {
      case LatticeSection::Kind::identity: return LatticeSpec::identity(q, m);
      case LatticeSection::Kind::gamma_b: return LatticeSpec::gamma_b(lattice.b);
      case LatticeSection::Kind::explicit_: break;
    }
    return LatticeSpec(*lattice.L1, *lattice.L2);
  });
  Problem p{std::move(g), std::move(norm), std::move(L)};
  with_path("config", [&] {
    validate_problem(p);
    return 0;
  });
  return p;
}

CounterOptions Config::counter_options() const {
  CounterOptions o;
  o.workers = run.workers;
  o.boundary_tolerance = run.boundary_tolerance;
  o.average_budget = run.average_budget;
  return o;
}

Config parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::schema, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema("$", "expected an object");
  only_keys(j, "$", {"group", "norm", "lattice", "run"});
  Config c;
  if (!j.contains("group")) schema("group", "required");
  c.group = group(j["group"]);

  if (j.contains("norm")) {
    const json& n = j["norm"];
    if (!n.is_object()) schema("norm", "expected an object");
    only_keys(n, "norm", {"alpha", "M1", "M2"});
    if (n.contains("alpha")) {
      Entry a = entry(n["alpha"], "norm.alpha");
      if (!(a.value > 0)) schema("norm.alpha", "must be positive");
      c.alpha = a.value;
      if (a.is_exact) c.alpha_exact = a.exact;
    } else {
      c.alpha_exact = Rational(2);
    }
    if (n.contains("M1")) c.M1 = matrix(n["M1"], "norm.M1");
    if (n.contains("M2")) c.M2 = matrix(n["M2"], "norm.M2");
  } else {
    c.alpha_exact = Rational(2);
  }

  if (j.contains("lattice")) {
    const json& l = j["lattice"];
    if (l.is_string()) {
      if (l.get<std::string>() != "identity") schema("lattice", "expected \"identity\" or an object");
    } else if (l.is_object()) {
      if (l.contains("gamma_b")) {
        only_keys(l, "lattice", {"gamma_b"});
        if (!l["gamma_b"].is_array() || l["gamma_b"].empty()) schema("lattice.gamma_b", "expected a list of positive integers");
        c.lattice.kind = LatticeSection::Kind::gamma_b;
        for (size_t i = 0; i < l["gamma_b"].size(); ++i)
          c.lattice.b.push_back(positive_int(l["gamma_b"][i], "lattice.gamma_b[" + std::to_string(i) + "]"));
      } else {
        only_keys(l, "lattice", {"L1", "L2"});
        if (!l.contains("L1") || !l.contains("L2")) schema("lattice", "expected L1 and L2");
        c.lattice.kind = LatticeSection::Kind::explicit_;
        c.lattice.L1 = matrix(l["L1"], "lattice.L1");
        c.lattice.L2 = matrix(l["L2"], "lattice.L2");
      }
    } else {
      schema("lattice", "expected \"identity\" or an object");
    }
  }

  if (j.contains("run")) {
    const json& r = j["run"];
    if (!r.is_object()) schema("run", "expected an object");
    only_keys(r, "run", {"workers", "seed", "boundary_tolerance", "average_budget", "max_fibres",
                         "poisson_max_evaluations", "poisson_max_tail_ratio"});
    if (r.contains("workers")) c.run.workers = positive_int(r["workers"], "run.workers");
    if (r.contains("seed")) {
      if (!r["seed"].is_number_unsigned()) schema("run.seed", "expected a non-negative integer");
      c.run.seed = r["seed"].get<std::uint64_t>();
    }
    if (r.contains("boundary_tolerance")) {
      if (!r["boundary_tolerance"].is_number() || r["boundary_tolerance"].get<double>() < 0)
        schema("run.boundary_tolerance", "expected a non-negative number");
      c.run.boundary_tolerance = r["boundary_tolerance"].get<double>();
    }
    if (r.contains("average_budget")) c.run.average_budget = positive_int(r["average_budget"], "run.average_budget");
    if (r.contains("max_fibres")) c.run.max_fibres = positive_number(r["max_fibres"], "run.max_fibres");
    if (r.contains("poisson_max_evaluations"))
      c.run.poisson_max_evaluations = positive_int(r["poisson_max_evaluations"], "run.poisson_max_evaluations");
    if (r.contains("poisson_max_tail_ratio"))
      c.run.poisson_max_tail_ratio = positive_number(r["poisson_max_tail_ratio"], "run.poisson_max_tail_ratio");
  }

  // Cross-dimension checks, then invertibility through the constructors.
  const GroupSpec g = with_path("group", [&] { return build_group(c.group); });
  auto shape = [&](const std::optional<Matrix>& M, int n, const char* path) {
    if (M && M->rows() != static_cast<size_t>(n))
      fail(Errc::dimension_mismatch, std::string(path) + ": expected " + std::to_string(n) + "x" + std::to_string(n));
  };
  shape(c.M1, g.q(), "norm.M1");
  shape(c.M2, g.m(), "norm.M2");
  shape(c.lattice.L1, g.q(), "lattice.L1");
  shape(c.lattice.L2, g.m(), "lattice.L2");
  if (c.lattice.kind == LatticeSection::Kind::gamma_b &&
      (g.m() != 1 || c.lattice.b.size() * 2 != static_cast<size_t>(g.q())))
    fail(Errc::dimension_mismatch, "lattice.gamma_b: needs " + std::to_string(g.q() / 2) + " entries on a group with m = 1");
  c.problem();
  return c;
}

Config parse_config(const std::string& text_or_path) {
  size_t i = text_or_path.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text_or_path[i] == '{') return parse_config_text(text_or_path);
  std::ifstream in(text_or_path);
  if (!in) fail(Errc::io, "cannot read config '" + text_or_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const Config& c, int indent) {
  json j;
  j["group"] = group_json(c.group);
  json n;
  if (c.alpha_exact) {
    const Rational& a = *c.alpha_exact;
    if (denominator(a) == 1)
      n["alpha"] = static_cast<std::int64_t>(numerator(a));
    else
      n["alpha"] = to_string(a);
  } else {
    n["alpha"] = c.alpha;
  }
  if (c.M1) n["M1"] = matrix_json(*c.M1);
  if (c.M2) n["M2"] = matrix_json(*c.M2);
  j["norm"] = n;
  switch (c.lattice.kind) {
    case LatticeSection::Kind::identity: j["lattice"] = "identity"; break;
    case LatticeSection::Kind::gamma_b: j["lattice"] = {{"gamma_b", c.lattice.b}}; break;
    case LatticeSection::Kind::explicit_:
      j["lattice"] = {{"L1", matrix_json(*c.lattice.L1)}, {"L2", matrix_json(*c.lattice.L2)}};
      break;
  }
  j["run"] = {{"workers", c.run.workers},
              {"seed", c.run.seed},
              {"boundary_tolerance", c.run.boundary_tolerance},
              {"average_budget", c.run.average_budget},
              {"max_fibres", c.run.max_fibres},
              {"poisson_max_evaluations", c.run.poisson_max_evaluations},
              {"poisson_max_tail_ratio", c.run.poisson_max_tail_ratio}};
  return j.dump(indent);
}

}  // namespace nilcount
