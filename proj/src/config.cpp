#include "catchup/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "catchup/applications.hpp"

namespace catchup {

namespace {

std::string format_message(const std::string& msg, const std::string& file, int line,
                           const std::string& section, const std::string& key) {
  std::ostringstream os;
  os << file;
  if (line > 0) os << ":" << line;
  os << ": ";
  if (!section.empty()) os << "[" << section << "] ";
  if (!key.empty()) os << "key '" << key << "': ";
  os << msg;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::string msg, std::string file, int line,
                         std::string section, std::string key)
    : std::runtime_error(format_message(msg, file, line, section, key)),
      file_(std::move(file)),
      section_(std::move(section)),
      key_(std::move(key)),
      line_(line) {}

namespace {

struct RawValue {
  std::string text;
  int line = 0;
  mutable bool used = false;
};

struct RawSection {
  int line = 0;
  std::map<std::string, RawValue> values;
};

struct Raw {
  std::string file;
  std::map<std::string, RawSection> sections;

  [[noreturn]] void fail(const std::string& msg, int line, const std::string& sec,
                         const std::string& key) const {
    throw ConfigError(msg, file, line, sec, key);
  }

  const RawValue* find(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto v = s->second.values.find(key);
    if (v == s->second.values.end()) return nullptr;
    v->second.used = true;
    return &v->second;
  }

  bool has_section(const std::string& sec) const { return sections.count(sec) > 0; }

  const RawValue& require(const std::string& sec, const std::string& key) const {
    const RawValue* v = find(sec, key);
    if (!v) {
      auto s = sections.find(sec);
      fail("missing required key", s == sections.end() ? 0 : s->second.line, sec, key);
    }
    return *v;
  }
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Raw parse_ini(const std::string& text, const std::string& filename) {
  Raw raw;
  raw.file = filename;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        raw.fail("malformed section header", lineno, "", "");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) raw.fail("empty section name", lineno, "", "");
      if (raw.sections.count(current))
        raw.fail("duplicate section", lineno, current, "");
      raw.sections[current].line = lineno;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      raw.fail("expected 'key = value' or '[section]'", lineno, current, "");
    if (current.empty()) raw.fail("entry before any section", lineno, "", "");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) raw.fail("empty key", lineno, current, "");
    auto& sec = raw.sections[current];
    if (sec.values.count(key)) raw.fail("duplicate key", lineno, current, key);
    sec.values[key] = RawValue{value, lineno, false};
  }
  return raw;
}

double parse_double(const Raw& raw, const std::string& sec, const RawValue& v,
                    const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v.text, &pos);
    if (trim(v.text.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  raw.fail("expected a number, got '" + v.text + "'", v.line, sec, key);
}

long parse_long(const Raw& raw, const std::string& sec, const RawValue& v,
                const std::string& key) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v.text, &pos);
    if (trim(v.text.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  raw.fail("expected an integer, got '" + v.text + "'", v.line, sec, key);
}

std::uint64_t parse_u64(const Raw& raw, const std::string& sec, const RawValue& v,
                        const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long d = std::stoull(v.text, &pos);
    if (trim(v.text.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  raw.fail("expected an unsigned integer, got '" + v.text + "'", v.line, sec, key);
}

Vec parse_vec(const Raw& raw, const std::string& sec, const RawValue& v,
              const std::string& key) {
  std::istringstream in(v.text);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t pos = 0;
      vals.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      raw.fail("expected numbers, got '" + tok + "'", v.line, sec, key);
    }
  }
  if (vals.empty()) raw.fail("expected at least one number", v.line, sec, key);
  Vec out(static_cast<int>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<int>(i)] = vals[i];
  return out;
}

Mat parse_mat(const Raw& raw, const std::string& sec, const RawValue& v,
              const std::string& key) {
  std::vector<std::vector<double>> rows;
  std::string row_text;
  std::istringstream rows_in(v.text);
  while (std::getline(rows_in, row_text, ';')) {
    std::istringstream in(row_text);
    std::vector<double> row;
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        raw.fail("expected numbers, got '" + tok + "'", v.line, sec, key);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) raw.fail("expected a matrix ('; ' between rows)", v.line, sec, key);
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) raw.fail("ragged matrix rows", v.line, sec, key);
  Mat out(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return out;
}

double get_double(const Raw& raw, const std::string& sec, const std::string& key,
                  double fallback) {
  const RawValue* v = raw.find(sec, key);
  return v ? parse_double(raw, sec, *v, key) : fallback;
}

// Interval-product family shared by [operator] kind=cone-interval and [sweeping]:
// endpoints lo/hi with linear drift in t and a common state-feedback shift.
struct IntervalFamily {
  Vec lo, hi, lo_rate, hi_rate;
  double state_coef = 0;
  int state_index = 0;
  double c_A = 0, L1 = 0, L2 = 0;
  int dim = 0;
};

IntervalFamily read_interval_family(const Raw& raw, const std::string& sec) {
  IntervalFamily fam;
  Vec lo = parse_vec(raw, sec, raw.require(sec, "lo"), "lo");
  Vec hi = parse_vec(raw, sec, raw.require(sec, "hi"), "hi");
  int dim = static_cast<int>(std::max(lo.size(), hi.size()));
  if (const RawValue* v = raw.find(sec, "dim"))
    dim = static_cast<int>(parse_long(raw, sec, *v, "dim"));
  if (dim < 1) raw.fail("dim must be positive", raw.sections.at(sec).line, sec, "dim");
  auto broadcast = [&](Vec& x, const char* key) {
    if (x.size() == 1 && dim > 1) x = Vec::Constant(dim, x[0]);
    if (x.size() != dim)
      raw.fail("length must match dim", raw.find(sec, key)->line, sec, key);
  };
  broadcast(lo, "lo");
  broadcast(hi, "hi");
  Vec lo_rate = Vec::Zero(dim), hi_rate = Vec::Zero(dim);
  if (const RawValue* v = raw.find(sec, "lo_rate")) {
    lo_rate = parse_vec(raw, sec, *v, "lo_rate");
    broadcast(lo_rate, "lo_rate");
  }
  if (const RawValue* v = raw.find(sec, "hi_rate")) {
    hi_rate = parse_vec(raw, sec, *v, "hi_rate");
    broadcast(hi_rate, "hi_rate");
  }
  fam.lo = lo;
  fam.hi = hi;
  fam.lo_rate = lo_rate;
  fam.hi_rate = hi_rate;
  fam.dim = dim;
  fam.state_coef = get_double(raw, sec, "state_coef", 0.0);
  if (const RawValue* v = raw.find(sec, "state_index")) {
    fam.state_index = static_cast<int>(parse_long(raw, sec, *v, "state_index"));
    if (fam.state_index < 0 || fam.state_index >= dim)
      raw.fail("state_index out of range", v->line, sec, "state_index");
  }
  double rate_bound = 0;
  for (int i = 0; i < dim; ++i) {
    if (std::isfinite(lo[i]) && std::isfinite(lo_rate[i]))
      rate_bound = std::max(rate_bound, std::abs(lo_rate[i]));
    if (std::isfinite(hi[i]) && std::isfinite(hi_rate[i]))
      rate_bound = std::max(rate_bound, std::abs(hi_rate[i]));
  }
  fam.c_A = get_double(raw, sec, "c_A", 0.0);
  fam.L1 = get_double(raw, sec, "L1", rate_bound);
  fam.L2 = get_double(raw, sec, "L2", std::abs(fam.state_coef));
  if (!(fam.L2 < 1.0)) {
    const RawValue* v = raw.find(sec, "L2");
    if (!v) v = raw.find(sec, "state_coef");
    raw.fail("state feedback modulus L2 must be < 1",
             v ? v->line : raw.sections.at(sec).line, sec, v ? "L2" : "state_coef");
  }
  for (int i = 0; i < dim; ++i)
    if (!(lo[i] <= hi[i]))
      raw.fail("lo must not exceed hi", raw.find(sec, "lo")->line, sec, "lo");
  return fam;
}

SetMap interval_family_map(const IntervalFamily& fam) {
  return [fam](double t, const Vec& s) {
    const double shift = fam.state_coef * s[fam.state_index];
    Vec lo(fam.dim), hi(fam.dim);
    for (int i = 0; i < fam.dim; ++i) {
      lo[i] = std::isfinite(fam.lo[i]) ? fam.lo[i] + fam.lo_rate[i] * t + shift
                                       : fam.lo[i];
      hi[i] = std::isfinite(fam.hi[i]) ? fam.hi[i] + fam.hi_rate[i] * t + shift
                                       : fam.hi[i];
    }
    return ConvexSet::interval_product(std::move(lo), std::move(hi));
  };
}

// [f] / [g]: affine map plus a sinusoidal drive, f(t,x) = M x + b + amp sin(wt + phase) dir.
std::function<Vec(double, const Vec&)> read_perturbation(const Raw& raw,
                                                         const std::string& sec,
                                                         int dim, double* growth_out) {
  Mat M = Mat::Zero(dim, dim);
  Vec b = Vec::Zero(dim);
  Vec dir = Vec::Zero(dim);
  dir[0] = 1.0;
  if (const RawValue* v = raw.find(sec, "matrix")) {
    M = parse_mat(raw, sec, *v, "matrix");
    if (M.rows() != dim || M.cols() != dim)
      raw.fail("matrix must be dim x dim", v->line, sec, "matrix");
  }
  if (const RawValue* v = raw.find(sec, "offset")) {
    b = parse_vec(raw, sec, *v, "offset");
    if (b.size() != dim) raw.fail("offset length must match dim", v->line, sec, "offset");
  }
  const double amp = get_double(raw, sec, "amp", 0.0);
  const double omega = get_double(raw, sec, "omega", 0.0);
  const double phase = get_double(raw, sec, "phase", 0.0);
  if (const RawValue* v = raw.find(sec, "dir")) {
    dir = parse_vec(raw, sec, *v, "dir");
    if (dir.size() != dim) raw.fail("dir length must match dim", v->line, sec, "dir");
  }
  if (growth_out) {
    // |f(t,x)| <= |M||x| + |b| + |amp| <= max(|M|, |b| + |amp|) (1 + |x|)
    Eigen::JacobiSVD<Mat> svd(M);
    const double nm = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    *growth_out = std::max(nm, b.norm() + std::abs(amp) * dir.norm());
  }
  return [M, b, amp, omega, phase, dir](double t, const Vec& x) {
    return Vec(M * x + b + amp * std::sin(omega * t + phase) * dir);
  };
}

OperatorHandle build_generic_operator(const Raw& raw, int* dim_out) {
  const std::string sec = "operator";
  if (!raw.has_section(sec)) raw.fail("missing [operator] section", 0, sec, "");
  const RawValue& kindv = raw.require(sec, "kind");
  const std::string kind = kindv.text;
  OperatorHandle op;
  if (kind == "relay") {
    const RawValue& dimv = raw.require(sec, "dim");
    const int dim = static_cast<int>(parse_long(raw, sec, dimv, "dim"));
    const double gamma = get_double(raw, sec, "gamma", 1.0);
    std::vector<int> mask;
    if (const RawValue* v = raw.find(sec, "mask")) {
      Vec mv = parse_vec(raw, sec, *v, "mask");
      for (int i = 0; i < mv.size(); ++i) {
        const int idx = static_cast<int>(std::llround(mv[i]));
        if (idx < 0 || idx >= dim) raw.fail("mask index out of range", v->line, sec, "mask");
        mask.push_back(idx);
      }
    }
    try {
      op = sign_relay(dim, gamma, mask);
    } catch (const std::invalid_argument& e) {
      raw.fail(e.what(), kindv.line, sec, "kind");
    }
  } else if (kind == "linear") {
    const RawValue& mv = raw.require(sec, "matrix");
    Mat M = parse_mat(raw, sec, mv, "matrix");
    if (M.rows() != M.cols()) raw.fail("matrix must be square", mv.line, sec, "matrix");
    try {
      op = linear_psd(M);
    } catch (const std::invalid_argument& e) {
      raw.fail(e.what(), mv.line, sec, "matrix");
    }
  } else if (kind == "cone-interval") {
    IntervalFamily fam = read_interval_family(raw, sec);
    op = normal_cone(fam.dim, interval_family_map(fam),
                     OperatorConstants{fam.c_A, fam.L1, fam.L2});
  } else if (kind == "zero") {
    const RawValue& dimv = raw.require(sec, "dim");
    op = zero_operator(static_cast<int>(parse_long(raw, sec, dimv, "dim")));
  } else {
    raw.fail("unknown operator kind '" + kind +
                 "' (expected relay | linear | cone-interval | zero)",
             kindv.line, sec, "kind");
  }
  if (kind != "cone-interval") {
    OperatorConstants oc = op.constants();
    oc.c_A = get_double(raw, sec, "c_A", oc.c_A);
    oc.L1 = get_double(raw, sec, "L1", oc.L1);
    oc.L2 = get_double(raw, sec, "L2", oc.L2);
    op = op.with_constants(oc);
  }
  *dim_out = op.dim();
  return op;
}

LureSystem build_lure_system(const Raw& raw, double T) {
  const std::string sec = "lure";
  if (!raw.has_section(sec)) raw.fail("missing [lure] section", 0, sec, "");
  LureSystem sys;
  sys.B = parse_mat(raw, sec, raw.require(sec, "B"), "B");
  sys.C = parse_mat(raw, sec, raw.require(sec, "C"), "C");
  sys.D = parse_mat(raw, sec, raw.require(sec, "D"), "D");
  sys.n = static_cast<int>(sys.B.rows());
  sys.m = static_cast<int>(sys.B.cols());
  sys.T = T;
  const RawValue& fv = raw.require(sec, "F");
  if (fv.text == "relay") {
    sys.F = sign_relay(sys.m, get_double(raw, sec, "gamma", 1.0));
  } else if (fv.text == "cone-interval") {
    Vec lo = parse_vec(raw, sec, raw.require(sec, "lo"), "lo");
    Vec hi = parse_vec(raw, sec, raw.require(sec, "hi"), "hi");
    if (lo.size() == 1 && sys.m > 1) lo = Vec::Constant(sys.m, lo[0]);
    if (hi.size() == 1 && sys.m > 1) hi = Vec::Constant(sys.m, hi[0]);
    if (lo.size() != sys.m || hi.size() != sys.m)
      raw.fail("lo/hi length must match m", fv.line, sec, "lo");
    const Vec lo_c = lo, hi_c = hi;
    sys.F = normal_cone(sys.m, [lo_c, hi_c](double, const Vec&) {
      return ConvexSet::interval_product(lo_c, hi_c);
    });
  } else {
    raw.fail("unknown F family '" + fv.text + "' (expected relay | cone-interval)",
             fv.line, sec, "F");
  }
  sys.L_F1 = get_double(raw, sec, "L_F1", 0.0);
  sys.L_F2 = get_double(raw, sec, "L_F2", 0.0);
  const bool cg_given = raw.find(sec, "c_g") != nullptr;
  if (cg_given) sys.c_g = get_double(raw, sec, "c_g", 0.0);
  if (const RawValue* v = raw.find(sec, "P")) sys.P = parse_mat(raw, sec, *v, "P");
  if (raw.has_section("g")) {
    double growth = 0;
    sys.g = read_perturbation(raw, "g", sys.n, &growth);
    if (!cg_given) sys.c_g = growth;
  }
  return sys;
}

void check_allowed(const Raw& raw, const std::set<std::string>& allowed) {
  for (const auto& [name, sec] : raw.sections) {
    if (!allowed.count(name))
      raw.fail("section not allowed for this scenario kind", sec.line, name, "");
    for (const auto& [key, val] : sec.values)
      if (!val.used) raw.fail("unknown key", val.line, name, key);
  }
}

}  // namespace

ScenarioConfig load_scenario_config_text(const std::string& text,
                                         const std::string& filename) {
  Raw raw = parse_ini(text, filename);
  if (!raw.has_section("scenario"))
    raw.fail("missing [scenario] section", 0, "scenario", "");
  const RawValue& kindv = raw.require("scenario", "kind");
  const std::string kind = kindv.text;

  ScenarioConfig cfg;
  cfg.kind = kind;
  if (const RawValue* v = raw.find("scenario", "name")) cfg.name = v->text;

  // [run]
  const bool builtin = kind == "builtin-example-1" || kind == "builtin-example-2";
  double T = -1;
  if (const RawValue* v = raw.find("run", "T")) {
    T = parse_double(raw, "run", *v, "T");
    if (!(T > 0)) raw.fail("T must be positive", v->line, "run", "T");
  }
  if (const RawValue* v = raw.find("run", "h")) {
    cfg.run.h = parse_double(raw, "run", *v, "h");
    if (!(cfg.run.h > 0)) raw.fail("h must be positive", v->line, "run", "h");
  }
  if (const RawValue* v = raw.find("run", "refine")) {
    cfg.run.refine = static_cast<int>(parse_long(raw, "run", *v, "refine"));
    if (cfg.run.refine < 0) raw.fail("refine must be >= 0", v->line, "run", "refine");
  }
  if (const RawValue* v = raw.find("run", "seed"))
    cfg.run.seed = parse_u64(raw, "run", *v, "seed");
  if (const RawValue* v = raw.find("run", "slack")) {
    if (v->text != "auto") {
      const double s = parse_double(raw, "run", *v, "slack");
      if (!(s >= 0)) raw.fail("slack must be >= 0 or 'auto'", v->line, "run", "slack");
      cfg.run.slack = s;
    }
  }
  if (const RawValue* v = raw.find("run", "delta")) {
    const double d = parse_double(raw, "run", *v, "delta");
    if (!(d > 0)) raw.fail("delta must be positive", v->line, "run", "delta");
    cfg.run.delta = d;
  }
  if (const RawValue* v = raw.find("run", "out")) cfg.run.out_dir = v->text;

  // [lyapunov]
  bool pair_enabled = true;
  if (const RawValue* v = raw.find("lyapunov", "pair")) {
    if (v->text == "none")
      pair_enabled = false;
    else if (v->text != "builtin")
      raw.fail("expected 'none' or 'builtin'", v->line, "lyapunov", "pair");
    if (v->text == "builtin" && !builtin)
      raw.fail("a builtin pair requires a builtin scenario kind", v->line, "lyapunov",
               "pair");
  }
  if (const RawValue* v = raw.find("lyapunov", "samples")) {
    cfg.lyap.samples = static_cast<int>(parse_long(raw, "lyapunov", *v, "samples"));
    if (cfg.lyap.samples < 1)
      raw.fail("samples must be positive", v->line, "lyapunov", "samples");
  }
  if (const RawValue* v = raw.find("lyapunov", "radius")) {
    if (v->text != "auto") {
      const double r = parse_double(raw, "lyapunov", *v, "radius");
      if (!(r > 0)) raw.fail("radius must be positive or 'auto'", v->line, "lyapunov",
                             "radius");
      cfg.lyap.radius = r;
    }
  }

  // [initial]
  double t0 = 0;
  Vec x0;
  if (const RawValue* v = raw.find("initial", "t0"))
    t0 = parse_double(raw, "initial", *v, "t0");
  if (const RawValue* v = raw.find("initial", "x0"))
    x0 = parse_vec(raw, "initial", *v, "x0");

  if (kind == "builtin-example-1") {
    const double p = get_double(raw, "scenario", "p", 1.0);
    DampedRotationGrowth g = DampedRotationGrowth::ConstOne;
    if (const RawValue* v = raw.find("scenario", "growth")) {
      if (v->text == "exp2t")
        g = DampedRotationGrowth::Exp2t;
      else if (v->text != "const")
        raw.fail("expected 'const' or 'exp2t'", v->line, "scenario", "growth");
    }
    try {
      cfg.bundle = example1_scenario(p, g, x0, T > 0 ? T : 2.0);
    } catch (const std::invalid_argument& e) {
      raw.fail(e.what(), kindv.line, "scenario", "kind");
    }
    check_allowed(raw, {"scenario", "initial", "run", "lyapunov"});
  } else if (kind == "builtin-example-2") {
    const double alpha = get_double(raw, "scenario", "alpha", 1.0);
    const double beta = get_double(raw, "scenario", "beta", 0.5);
    const double gamma = get_double(raw, "scenario", "gamma", 1.0);
    try {
      cfg.bundle = example2_scenario(alpha, beta, gamma, x0, T > 0 ? T : 2.0);
    } catch (const std::invalid_argument& e) {
      raw.fail(e.what(), kindv.line, "scenario", "kind");
    }
    check_allowed(raw, {"scenario", "initial", "run", "lyapunov"});
  } else if (kind == "generic" || kind == "sweeping" || kind == "lure") {
    if (T <= 0) raw.fail("missing required key (non-builtin scenarios need [run] T)",
                         0, "run", "T");
    if (cfg.run.h <= 0)
      raw.fail("missing required key (non-builtin scenarios need [run] h)", 0, "run",
               "h");
    if (x0.size() == 0)
      raw.fail("missing required key (non-builtin scenarios need [initial] x0)", 0,
               "initial", "x0");
    ScenarioBundle b;
    b.name = cfg.name.empty() ? kind : cfg.name;
    b.x0 = x0;
    b.t0 = t0;
    b.default_h = cfg.run.h;
    b.delta = cfg.run.delta.value_or(1.0);
    if (kind == "generic") {
      int dim = 0;
      InclusionProblem prob;
      prob.A = build_generic_operator(raw, &dim);
      prob.dim = dim;
      prob.T = T;
      if (raw.has_section("f")) {
        double growth = 0;
        prob.f = read_perturbation(raw, "f", dim, &growth);
        prob.c_f = get_double(raw, "f", "c_f", growth);
      }
      b.problem = std::move(prob);
      check_allowed(raw, {"scenario", "operator", "f", "initial", "run", "lyapunov"});
    } else if (kind == "sweeping") {
      if (!raw.has_section("sweeping"))
        raw.fail("missing [sweeping] section", 0, "sweeping", "");
      IntervalFamily fam = read_interval_family(raw, "sweeping");
      SweepingScenario sc;
      sc.dim = fam.dim;
      sc.moving_set = interval_family_map(fam);
      sc.c_A = fam.c_A;
      sc.L1 = fam.L1;
      sc.L2 = fam.L2;
      sc.T = T;
      if (raw.has_section("f")) {
        double growth = 0;
        sc.f = read_perturbation(raw, "f", fam.dim, &growth);
        sc.c_f = get_double(raw, "f", "c_f", growth);
      }
      try {
        b.problem = sweeping_problem(sc);
      } catch (const std::invalid_argument& e) {
        raw.fail(e.what(), raw.sections.at("sweeping").line, "sweeping", "");
      }
      check_allowed(raw, {"scenario", "sweeping", "f", "initial", "run", "lyapunov"});
    } else {
      LureSystem sys = build_lure_system(raw, T);
      try {
        b.problem = lure_problem(sys);
        AssumptionReport rep = check_assumptions(sys);
        std::ostringstream os;
        os << "assumption checks:\n";
        for (const auto& e : rep.entries) {
          const char* st = e.status == CheckStatus::Pass          ? "pass"
                           : e.status == CheckStatus::Fail        ? "FAIL"
                           : e.status == CheckStatus::SampledPass ? "pass (sampled)"
                           : e.status == CheckStatus::SampledFail ? "FAIL (sampled)"
                                                                  : "info";
          os << "  " << e.name << ": " << st << " (value " << e.value << ") "
             << e.detail << "\n";
        }
        cfg.notes = os.str();
      } catch (const std::invalid_argument& e) {
        raw.fail(e.what(), raw.sections.at("lure").line, "lure", "");
      } catch (const std::runtime_error& e) {
        raw.fail(e.what(), raw.sections.at("lure").line, "lure", "");
      }
      check_allowed(raw, {"scenario", "lure", "g", "initial", "run", "lyapunov"});
    }
    cfg.bundle = std::move(b);
  } else {
    raw.fail("unknown scenario kind '" + kind +
                 "' (expected generic | sweeping | lure | builtin-example-1 | "
                 "builtin-example-2)",
             kindv.line, "scenario", "kind");
  }

  if (builtin) {
    cfg.bundle.t0 = t0;
    if (cfg.run.delta) cfg.bundle.delta = *cfg.run.delta;
  }
  if (!pair_enabled) cfg.bundle.pair.reset();
  if (cfg.name.empty()) cfg.name = cfg.bundle.name;
  return cfg;
}

ScenarioConfig load_scenario_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open config file", path, 0, "", "");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_config_text(buf.str(), path);
}

}  // namespace catchup
