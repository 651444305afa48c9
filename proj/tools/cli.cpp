#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stieltjes/lab.hpp"

namespace stieltjes::cli {

namespace {

constexpr int kSchema = 1;

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) throw ParseError("bad number '" + s + "' in " + what);
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  double v = parse_number(s, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError("expected an integer, got '" + s + "' in " + what);
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool is_file(const std::string& s) {
  std::error_code ec;
  return std::filesystem::is_regular_file(s, ec);
}

Measure parse_term(const std::string& t) {
  if (is_file(t)) return measure_from_json(read_file(t));
  auto parts = split(t, ':');
  const std::string& head = parts[0];
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) throw ParseError("wrong number of fields in '" + t + "'");
  };
  if (head == "zero") {
    want(1, 1);
    return Measure::zero();
  }
  if (head == "lebesgue") {
    want(1, 2);
    return Measure::lebesgue(parts.size() == 2 ? parse_number(parts[1], t) : 1.0);
  }
  if (head == "atom") {
    want(3, 3);
    return Measure::dirac(parse_number(parts[1], t), parse_number(parts[2], t));
  }
  if (head == "density") {
    want(2, 4);
    const std::string& c = parts[1];
    if (c.size() < 2 || c.front() != '[' || c.back() != ']') throw ParseError("density needs [c0,c1,...] in '" + t + "'");
    std::vector<double> coeffs;
    for (const auto& s : split(c.substr(1, c.size() - 2), ',')) coeffs.push_back(parse_number(s, t));
    double lo = 0.0, hi = 1.0;
    if (parts.size() >= 3) lo = parse_number(parts[2], t);
    if (parts.size() == 4) hi = parse_number(parts[3], t);
    return Measure::density(coeffs, lo, hi);
  }
  if (head == "ramp") {
    want(2, 2);
    return ramp_sequence(parse_int(parts[1], t));
  }
  if (head == "osc") {
    want(2, 2);
    return oscillation_sequence(parse_int(parts[1], t));
  }
  if (head == "random") {
    want(2, 3);
    std::mt19937_64 rng(static_cast<std::uint64_t>(parse_int(parts[1], t)));
    RandomMeasureSpec spec;
    if (parts.size() == 3) spec.total_variation = parse_number(parts[2], t);
    return random_measure(rng, spec);
  }
  throw ParseError("unrecognized measure literal or missing file '" + t + "'");
}

// '+' separates terms unless it is the sign of an exponent
std::vector<std::string> split_sum(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '[') ++depth;
    if (c == ']') --depth;
    bool exponent = i >= 2 && (s[i - 1] == 'e' || s[i - 1] == 'E') &&
                    (std::isdigit(static_cast<unsigned char>(s[i - 2])) || s[i - 2] == '.');
    if (c == '+' && depth == 0 && !exponent) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> v;
  for (const auto& t : split(s, ',')) v.push_back(parse_number(t, what));
  return v;
}

std::vector<Complex> parse_complex_list(const std::string& s) {
  std::vector<Complex> v;
  for (const auto& t : split(s, ',')) v.push_back(parse_complex(t));
  return v;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Options {
  std::string p = "zero", q = "zero", lambda = "0", init = "1,0,0";
  int bc = 1, n_min = 0, n_max = 0, grid = 0;
  double tol = 1e-14, c_pi = 1e4;
  std::string out, format = "csv";
  bool verify_count = false;
  std::string nu = "lebesgue", dir = "p", eps = "1e-2,1e-3,1e-4";
  bool field = false;
  std::string experiment, seq = "ramp", ms = "10,100,1000";
};

struct Table {
  std::vector<std::string> columns;
  std::string body;  // CSV rows
  std::vector<std::string> summary;
};

struct Context {
  std::string command;
  Options o;
  Measure p, q;
  SpectrumConfig scfg;

  std::string canonical() const {
    std::ostringstream s;
    s << "command=" << command << ";p=" << to_json(p) << ";q=" << to_json(q) << ";lambda=" << o.lambda
      << ";init=" << o.init << ";bc=" << o.bc << ";n=" << o.n_min << ".." << o.n_max << ";grid=" << o.grid
      << ";tol=" << fmt("%.17g", o.tol) << ";c_pi=" << fmt("%.17g", o.c_pi) << ";verify=" << o.verify_count;
    if (command == "sens") s << ";nu=" << to_json(parse_measure(o.nu)) << ";dir=" << o.dir << ";eps=" << o.eps
                             << ";field=" << o.field;
    if (command == "lab") s << ";experiment=" << o.experiment << ";seq=" << o.seq << ";ms=" << o.ms
                            << ";eps=" << o.eps;
    return s.str();
  }
};

SpectrumConfig make_spectrum_config(const Options& o) {
  if (!(o.tol > 0.0)) throw DomainError("--tol must be positive");
  if (!(o.c_pi > 0.0)) throw DomainError("--c-pi must be positive");
  SpectrumConfig c;
  c.c_pi = o.c_pi;
  c.solver.tolerance = o.tol;
  return c;
}

std::string csv_header(const Context& ctx) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "# stieltjes %s schema=%d command=%s config=fnv1a:%016llx tol=%.3g k_tol=%.3g c_pi=%.6g\n",
                STIELTJES_VERSION, kSchema, ctx.command.c_str(),
                static_cast<unsigned long long>(fnv1a(ctx.canonical())), ctx.scfg.solver.tolerance, ctx.scfg.k_tol,
                ctx.scfg.c_pi);
  return buf;
}

nlohmann::ordered_json cell(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size()) {
    if (s.find_first_of(".eEn") == std::string::npos && std::abs(v) < 9e15) return static_cast<long long>(v);
    return v;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  return s;
}

std::string render(const Context& ctx, const Table& t) {
  if (ctx.o.format == "csv") {
    std::string out = csv_header(ctx);
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n" + t.body;
    return out;
  }
  nlohmann::ordered_json j;
  j["tool"] = "stieltjes";
  j["version"] = STIELTJES_VERSION;
  j["schema"] = kSchema;
  j["command"] = ctx.command;
  char hash[32];
  std::snprintf(hash, sizeof hash, "fnv1a:%016llx", static_cast<unsigned long long>(fnv1a(ctx.canonical())));
  j["config"] = hash;
  j["tolerances"] = {{"tol", ctx.scfg.solver.tolerance}, {"k_tol", ctx.scfg.k_tol}, {"c_pi", ctx.scfg.c_pi}};
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  std::istringstream lines(t.body);
  for (std::string line; std::getline(lines, line);) {
    if (line.empty()) continue;
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (const auto& c : split(line, ',')) row.push_back(cell(c));
    j["rows"].push_back(row);
  }
  j["summary"] = t.summary;
  return j.dump(1) + "\n";
}

void emit(const Context& ctx, const Table& t, std::ostream& out) {
  std::string text = render(ctx, t);
  for (const auto& s : t.summary) out << s << "\n";
  if (ctx.o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(ctx.o.out, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + ctx.o.out + "'");
  f << text;
}

std::vector<double> uniform_grid(int cells) {
  std::vector<double> xs;
  for (int i = 1; i < cells; ++i) xs.push_back(static_cast<double>(i) / cells);
  return xs;
}

Table cmd_solve(Context& ctx) {
  const Options& o = ctx.o;
  Complex lam = parse_complex(o.lambda);
  auto iv = parse_complex_list(o.init);
  if (iv.size() != 3) throw ParseError("--init needs three entries y,y',w");
  SolverConfig cfg = ctx.scfg.solver;
  if (o.grid < 0) throw DomainError("--grid must be nonnegative");
  cfg.extra_breakpoints = uniform_grid(o.grid);
  SolutionPath path = solve_picard(ctx.p, ctx.q, lam, {iv[0], iv[1], iv[2]}, cfg);
  const PathNode& end = path.back();
  Table t;
  t.columns = {"x", "re_y", "im_y", "re_yp", "im_yp", "re_w", "im_w", "is_atom"};
  t.body = path_csv_rows(path);
  t.summary.push_back("y(1)=" + format_complex(end.y) + " y'(1)=" + format_complex(end.yp) +
                      " w(1)=" + format_complex(end.w));
  return t;
}

Table cmd_charfn(Context& ctx) {
  const Options& o = ctx.o;
  std::vector<double> lams;
  auto range = split(o.lambda, ':');
  if (range.size() == 1) {
    lams.push_back(parse_number(range[0], "--lambda"));
  } else if (range.size() == 2) {
    double a = parse_number(range[0], "--lambda"), b = parse_number(range[1], "--lambda");
    int n = o.grid > 0 ? o.grid : 1001;
    if (n < 2 || !(b > a)) throw DomainError("charfn range needs lo < hi and --grid >= 2");
    for (int i = 0; i < n; ++i) lams.push_back(i + 1 == n ? b : a + (b - a) * i / (n - 1));
  } else {
    throw ParseError("--lambda for charfn is a value or lo:hi");
  }
  auto rows = char_scan(ctx.p, ctx.q, lams, ctx.scfg.solver);
  Table t;
  t.columns = {"lambda", "k", "re_delta1", "im_delta1", "re_delta2", "im_delta2", "Y1", "Z1"};
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.lambda, r.k,
                  r.delta1.real(), r.delta1.imag(), r.delta2.real(), r.delta2.imag(), r.Y1, r.Z1);
    t.body += buf;
  }
  // Delta_1 = -2i Z1 and Delta_2 = 2 Y1 on the real axis
  for (int xi : {1, 2}) {
    std::string s = "sign_changes_xi" + std::to_string(xi) + "=";
    bool first = true;
    auto val = [&](std::size_t i) { return xi == 1 ? rows[i].Z1 : rows[i].Y1; };
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double at = 0.0;
      if (val(i) == 0.0)
        at = rows[i].lambda;
      else if (i + 1 < rows.size() && val(i + 1) != 0.0 && (val(i) < 0) != (val(i + 1) < 0))
        at = 0.5 * (rows[i].lambda + rows[i + 1].lambda);
      else
        continue;
      s += (first ? "" : ",") + fmt("%.10g", at);
      first = false;
    }
    t.summary.push_back(s);
  }
  return t;
}

Table cmd_eig(Context& ctx) {
  const Options& o = ctx.o;
  auto pairs = spectrum_scan(ctx.p, ctx.q, o.bc, o.n_min, o.n_max, ctx.scfg);
  Table t;
  t.columns = {"xi", "n", "lambda", "k", "a_simple", "g_mult", "bc_residual", "norm_residual"};
  t.body = spectrum_csv_rows(pairs);
  try {
    t.summary.push_back("counting_threshold=" + std::to_string(counting_threshold(ctx.p, ctx.q, o.bc, o.c_pi)));
  } catch (const NumericError&) {
    t.summary.push_back("counting_threshold=out_of_range");
  }
  if (o.verify_count) {
    for (const auto& e : pairs) {
      double r = ctx.scfg.disc_radius;
      for (const auto& f : pairs)
        if (&f != &e && f.k != e.k) r = std::min(r, 0.5 * std::abs(f.k - e.k));
      int expect = e.a_simple ? 1 : 2;
      int got = count_zeros_disc(ctx.p, ctx.q, o.bc, e.k, r, ctx.scfg);
      if (got != expect)
        throw InconsistencyError("disc count " + std::to_string(got) + " around n = " + std::to_string(e.n) +
                                 ", expected " + std::to_string(expect));
    }
    t.summary.push_back("counts consistent (" + std::to_string(pairs.size()) + " discs)");
  }
  return t;
}

Direction parse_direction(const std::string& s) {
  if (s == "p") return Direction::P;
  if (s == "q") return Direction::Q;
  throw ParseError("--dir is p or q");
}

Table cmd_sens(Context& ctx) {
  const Options& o = ctx.o;
  Direction dir = parse_direction(o.dir);
  Measure nu = parse_measure(o.nu);
  SpectrumConfig c = ctx.scfg;
  c.eigenfunctions = true;
  Eigenpair eig = find_eigenvalue(ctx.p, ctx.q, o.bc, o.n_min, c);
  Table t;
  if (o.field) {
    SensitivityField f = dir == Direction::P ? dlambda_dp(eig) : dlambda_dq(eig);
    t.columns = {"x", "value"};
    t.body = field_csv_rows(f);
    t.summary.push_back("lambda=" + fmt("%.17g", eig.lambda) + " pairing=" + fmt("%.17g", f.pair(nu)));
    return t;
  }
  FdTable fd = fd_check(ctx.p, ctx.q, eig, nu, dir, parse_list(o.eps, "--eps"), c);
  t.columns = {"eps", "fd", "formula", "abs_err"};
  t.body = fd_csv_rows(fd);
  t.summary.push_back("lambda=" + fmt("%.17g", fd.lambda) + " formula=" + fmt("%.17g", fd.formula) +
                      " decreasing=" + (fd.decreasing ? "true" : "false"));
  return t;
}

Table cmd_lab(Context& ctx) {
  const Options& o = ctx.o;
  Table t;
  if (o.experiment == "asym") {
    ResidualReport r = asymptotic_residuals(ctx.p, ctx.q, o.bc, o.n_min, o.n_max, ctx.scfg);
    t.columns = {"xi", "n", "lambda", "leading", "residual"};
    t.body = residual_csv_rows(r);
    t.summary.push_back("q_integral=" + fmt("%.17g", r.q_integral) + " lower_max=" + fmt("%.6e", r.lower_max) +
                        " upper_max=" + fmt("%.6e", r.upper_max) + " verdict=" + (r.verdict ? "true" : "false"));
  } else if (o.experiment == "weakstar") {
    std::vector<int> ms;
    for (double m : parse_list(o.ms, "--ms")) ms.push_back(parse_int(fmt("%.17g", m), "--ms"));
    ConvergenceReport r;
    if (o.seq == "ramp") {
      r = weakstar_eig([](int m) { return ramp_sequence(m); }, ms, Measure::dirac(0.5), ctx.q, o.bc, o.n_min,
                       Direction::P, ctx.scfg);
    } else if (o.seq == "osc") {
      const Measure q0 = ctx.q;
      r = weakstar_eig([&q0](int m) { return q0 + oscillation_sequence(m); }, ms, q0, ctx.p, o.bc, o.n_min,
                       Direction::Q, ctx.scfg);
    } else {
      throw ParseError("--seq is ramp or osc");
    }
    t.columns = {"param", "value", "reference", "error"};
    t.body = convergence_csv_rows(r);
    for (std::size_t i = 0; i < r.failures.size(); ++i)
      if (!r.failures[i].empty()) t.summary.push_back("failure m=" + std::to_string(ms[i]) + ": " + r.failures[i]);
    t.summary.push_back(std::string("verdict=") + (r.verdict ? "true" : "false"));
  } else if (o.experiment == "solcont") {
    std::vector<Perturbation> perts;
    for (double e : parse_list(o.eps, "--eps")) perts.push_back({Measure::lebesgue(e), Measure::zero()});
    ContinuityReport r = solution_continuity(ctx.p, ctx.q, perts, parse_complex_list(o.lambda), ctx.scfg.solver);
    t.columns = {"delta", "sup_y", "sup_yp", "sup_w"};
    t.body = continuity_csv_rows(r);
    t.summary.push_back(std::string("verdict=") + (r.verdict ? "true" : "false"));
  } else if (o.experiment == "bounds") {
    std::vector<BoundSample> s;
    int cells = o.grid > 0 ? o.grid : 10;
    for (Complex lam : parse_complex_list(o.lambda))
      for (int i = 0; i <= cells; ++i) s.push_back({static_cast<double>(i) / cells, lam});
    BoundAuditReport r = bound_audit(ctx.p, ctx.q, s, ctx.scfg.solver);
    t.columns = {"x", "re_lambda", "im_lambda", "j", "kind", "lhs", "rhs"};
    t.body = bound_csv_rows(r);
    t.summary.push_back("checks=" + std::to_string(r.checks) + " violations=" + std::to_string(r.violations.size()) +
                        " max_ratio=" + fmt("%.6e", r.max_ratio));
  } else {
    throw ParseError("lab experiment is one of weakstar, solcont, bounds, asym");
  }
  return t;
}

int cmd_measure(Context& ctx, std::ostream& out) {
  std::string text = to_json(ctx.p) + "\n";
  if (ctx.o.out.empty()) {
    out << text;
    return 0;
  }
  std::ofstream f(ctx.o.out, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + ctx.o.out + "'");
  f << text;
  out << "total_variation=" << fmt("%.17g", total_variation(ctx.p)) << " sup_norm=" << fmt("%.17g", ctx.p.sup_norm())
      << " function_integral=" << fmt("%.17g", ctx.p.function_integral()) << "\n";
  return 0;
}

void report(std::ostream& err, const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  err << j.dump() << "\n";
}

}  // namespace

Measure parse_measure(const std::string& text) {
  if (text.empty()) throw ParseError("empty measure literal");
  if (is_file(text)) return measure_from_json(read_file(text));
  Measure m;
  for (const auto& term : split_sum(text)) m = m + parse_term(term);
  return m;
}

Complex parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ParseError("empty complex number");
  if (s.back() != 'i') return {parse_number(s, "complex number"), 0.0};
  std::string body = s.substr(0, s.size() - 1);
  std::size_t cut = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  std::string re = cut == std::string::npos ? "" : body.substr(0, cut);
  std::string im = cut == std::string::npos ? body : body.substr(cut);
  double imv = im.empty() || im == "+" ? 1.0 : im == "-" ? -1.0 : parse_number(im, "complex number");
  return {re.empty() ? 0.0 : parse_number(re, "complex number"), imv};
}

std::string format_complex(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.15g%+.15gi", z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag());
  return buf;
}

int exit_code_for(const std::string& code) {
  if (code == "ARG_PARSE" || code == "MEASURE_PARSE" || code == "DOMAIN") return 2;
  if (code == "CONSISTENCY" || code == "INCONSISTENT_COUNT" || code == "INTERNAL") return 4;
  return 3;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Measure-coefficient third-order spectral problems"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s) {
    s->add_option("--p", o.p, "p measure: literal or JSON file");
    s->add_option("--q", o.q, "q measure: literal or JSON file");
    s->add_option("--tol", o.tol, "solver tolerance");
    s->add_option("--out", o.out, "output file (stdout when absent)");
    s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--c-pi", o.c_pi, "constant of the counting threshold");
  };
  auto spectral = [&](CLI::App* s) {
    s->add_option("--bc", o.bc, "boundary condition 1 or 2")->check(CLI::IsMember({1, 2}));
    s->add_option("--n-min", o.n_min, "first index");
    s->add_option("--n-max", o.n_max, "last index");
  };

  CLI::App* solve = app.add_subcommand("solve", "integrate one initial value problem");
  common(solve);
  solve->add_option("--lambda", o.lambda, "spectral parameter, e.g. 8 or 2-3i");
  solve->add_option("--init", o.init, "y(0),y'(0),w(0)");
  solve->add_option("--grid", o.grid, "extra uniform mesh cells");

  CLI::App* charfn = app.add_subcommand("charfn", "characteristic functions on a real lambda grid");
  common(charfn);
  charfn->add_option("--lambda", o.lambda, "value or lo:hi");
  charfn->add_option("--grid", o.grid, "number of grid points for a range");

  CLI::App* eig = app.add_subcommand("eig", "eigenvalues for an index range");
  common(eig);
  spectral(eig);
  eig->add_flag("--verify-count", o.verify_count, "argument-principle count around every root");

  CLI::App* sens = app.add_subcommand("sens", "eigenvalue derivative: field or finite-difference table");
  common(sens);
  spectral(sens);
  sens->add_option("--nu", o.nu, "direction measure");
  sens->add_option("--dir", o.dir, "p or q")->check(CLI::IsMember({"p", "q"}));
  sens->add_option("--eps", o.eps, "comma-separated step sizes");
  sens->add_flag("--field", o.field, "emit the derivative field instead of the table");

  CLI::App* lab = app.add_subcommand("lab", "experiments: weakstar, solcont, bounds, asym");
  common(lab);
  spectral(lab);
  lab->add_option("experiment", o.experiment)->required()->check(
      CLI::IsMember({"weakstar", "solcont", "bounds", "asym"}));
  lab->add_option("--lambda", o.lambda, "comma-separated lambda set (solcont, bounds)");
  lab->add_option("--grid", o.grid, "x cells for bounds");
  lab->add_option("--eps", o.eps, "perturbation sizes for solcont");
  lab->add_option("--seq", o.seq, "ramp or osc (weakstar)");
  lab->add_option("--ms", o.ms, "comma-separated sequence parameters (weakstar)");

  CLI::App* meas = app.add_subcommand("measure", "load, validate and print a measure as JSON");
  meas->add_option("--p", o.p, "measure literal or JSON file");
  meas->add_option("--out", o.out, "output file");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report(err, "ARG_PARSE", e.what());
    return 2;
  }

  try {
    Context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.o = o;
    ctx.p = parse_measure(o.p);
    ctx.q = parse_measure(o.q);
    if (ctx.command == "measure") return cmd_measure(ctx, out);
    ctx.scfg = make_spectrum_config(o);
    Table t;
    if (ctx.command == "solve")
      t = cmd_solve(ctx);
    else if (ctx.command == "charfn")
      t = cmd_charfn(ctx);
    else if (ctx.command == "eig")
      t = cmd_eig(ctx);
    else if (ctx.command == "sens")
      t = cmd_sens(ctx);
    else
      t = cmd_lab(ctx);
    emit(ctx, t, out);
    return 0;
  } catch (const Error& e) {
    report(err, e.code(), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    report(err, "INTERNAL", e.what());
    return 4;
  }
}

}  // namespace stieltjes::cli
