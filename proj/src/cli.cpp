#include "quadint/cli.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "quadint/errors.hpp"
#include "quadint/experiments.hpp"
#include "quadint/fields.hpp"
#include "quadint/interpolation.hpp"
#include "quadint/norms.hpp"
#include "quadint/reference_map.hpp"

namespace quadint::cli {
namespace {

using njson = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;
constexpr const char* kVersion = "0.1.0";
constexpr const char* kExitLegend =
    "exit codes: 0 success, 1 numerical failure or inconclusive study, "
    "2 usage error, 3 study assertion failure";

std::vector<double> parse_numbers(const std::string& spec) {
  std::string flat = spec;
  for (char& c : flat) {
    if (c == ',' || c == ';') c = ' ';
  }
  std::istringstream ss(flat);
  std::vector<double> out;
  double v = 0.0;
  while (ss >> v) out.push_back(v);
  if (!ss.eof()) throw ParseError("malformed number in \"" + spec + "\"");
  return out;
}

ConvexQuad quad_from_spec(const std::string& spec) {
  const std::vector<double> n = parse_numbers(spec);
  if (n.size() != 8) {
    throw ParseError("--quad needs 8 numbers \"x1 y1 x2 y2 x3 y3 x4 y4\"");
  }
  return ConvexQuad(
      {Point2{n[0], n[1]}, {n[2], n[3]}, {n[4], n[5]}, {n[6], n[7]}});
}

CanonicalQuad canonical_from_spec(const std::string& spec) {
  const std::vector<double> n = parse_numbers(spec);
  if (n.size() != 4) throw ParseError("--canonical needs 4 numbers a,b,at,bt");
  return CanonicalQuad(n[0], n[1], n[2], n[3]);
}

std::vector<double> grid_from_spec(const std::string& spec) {
  const std::vector<double> g = parse_numbers(spec);
  if (g.empty()) throw ParseError("--grid must list at least one number");
  return g;
}

njson quad_json(const ConvexQuad& q) {
  njson v = njson::array();
  for (int i = 0; i < 4; ++i) {
    v.push_back(njson::array({q.vertex(i).x, q.vertex(i).y}));
  }
  return v;
}

njson flag_json(const FlagResult& f) {
  return njson{{"holds", f.holds}, {"attained", f.attained}};
}

njson report_json(const ConditionReport& rep) {
  return njson{
      {"psi_min", rep.psi_min},
      {"psi_max", rep.psi_max},
      {"mac", rep.mac},
      {"MAC", rep.MAC},
      {"DAC", rep.DAC},
      {"rdp", njson{{"diagonal", rep.rdp.diagonal},
                    {"ratio_n", rep.rdp.ratio_n},
                    {"psi_max", rep.rdp.psi_max}}},
      {"h_over_rho", rep.h_over_rho},
      {"flags", njson{{"delta1", flag_json(rep.flags.delta1)},
                      {"d1", flag_json(rep.flags.d1)},
                      {"d2", flag_json(rep.flags.d2)},
                      {"delta2", flag_json(rep.flags.delta2)},
                      {"d3", flag_json(rep.flags.d3)}}}};
}

njson norm_json(const NormResult& n) {
  return njson{{"value", n.value},
               {"order", n.order},
               {"est_error", n.est_error},
               {"converged", n.converged},
               {"near_singular", n.near_singular}};
}

njson envelope(const std::string& command, njson params, njson result) {
  return njson{{"tool", "quadint"},
               {"version", kVersion},
               {"command", command},
               {"params", std::move(params)},
               {"result", std::move(result)}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError(path + ": cannot open output file");
  f << text;
  f.flush();
  if (!f) throw ParseError(path + ": write failed");
}

int emit_error(std::ostream& err, const char* type, const std::string& message,
               int code) {
  err << njson{{"error", type}, {"message", message}, {"exit", code}}.dump()
      << '\n';
  return code;
}

/// Writes a non-study envelope to --out or standard output.
void emit_simple(const njson& env, const std::string& out_path,
                 std::ostream& out) {
  const std::string line = env.dump();
  if (!out_path.empty()) {
    write_file(out_path, line + "\n");
  } else {
    out << line << '\n';
  }
}

int study_exit(Verdict v) {
  if (v == Verdict::Failed) return 3;
  if (v == Verdict::Inconclusive) return 1;
  return 0;
}

/// Flags shared by every sweep study.
struct StudyFlags {
  int quad_order = 0;
  int rate_window = 4;
  int jobs = 1;
  std::string field;
  std::string format = "json";
  std::string out_path;

  void attach(CLI::App* sub, bool with_field) {
    sub->add_option("--quad-order", quad_order,
                    "points per direction for quadrature; 0 selects k + 6")
        ->check(CLI::Range(0, 64))
        ->capture_default_str();
    sub->add_option("--rate-window", rate_window,
                    "fit slopes on this many smallest grid parameters")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--jobs", jobs, "worker threads across grid points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    if (with_field) {
      sub->add_option("--field", field,
                      "probe field (cex1, cex2, trig, poly:<rows>); empty "
                      "selects the study default");
    }
    sub->add_option("--format", format, "payload format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub->add_option("--out", out_path,
                    "write the payload to this file; the one-line JSON "
                    "summary then goes to standard output");
  }

  StudyOptions options() const {
    StudyOptions o;
    o.quad_order = quad_order;
    o.rate_window = rate_window;
    o.jobs = jobs;
    o.field = field;
    return o;
  }

  njson echo(int k) const {
    return njson{{"quad_order", quad_order > 0 ? quad_order : k + 6},
                 {"rate_window", rate_window},
                 {"jobs", jobs},
                 {"format", format},
                 {"out", out_path}};
  }
};

/// Emits a study: json format wraps summary + warnings + CSV in the
/// envelope; csv format is the bare CSV table.  With --out the payload goes
/// to the file and the one-line summary to standard output.
int finish_study(const StudyResult& res, const StudyFlags& sf,
                 const std::string& cmd, njson params, std::ostream& out) {
  const std::string csv = to_csv(res.rows);
  const std::string summary = summary_json(res);
  if (sf.format == "csv") {
    if (!sf.out_path.empty()) {
      write_file(sf.out_path, csv);
      out << summary << '\n';
    } else {
      out << csv;
    }
  } else {
    njson result{{"summary", njson::parse(summary)},
                 {"max_ratio", res.max_ratio},
                 {"warnings", res.warnings},
                 {"rows", res.rows.size()},
                 {"csv", csv}};
    const std::string line =
        envelope(cmd, std::move(params), std::move(result)).dump();
    if (!sf.out_path.empty()) {
      write_file(sf.out_path, line + "\n");
      out << summary << '\n';
    } else {
      out << line << '\n';
    }
  }
  return study_exit(res.verdict);
}

/// Exactly one quad source; returns the quad and echoes it into params.
ConvexQuad resolve_single_quad(const std::string& quad_spec,
                               const std::string& canon_spec, njson& params) {
  const int sources = (quad_spec.empty() ? 0 : 1) + (canon_spec.empty() ? 0 : 1);
  if (sources != 1) {
    throw ParseError("pass exactly one of --quad or --canonical");
  }
  const ConvexQuad q = quad_spec.empty()
                           ? canonical_from_spec(canon_spec).to_quad()
                           : quad_from_spec(quad_spec);
  params["quad"] = quad_json(q);
  return q;
}

struct ClassifyArgs {
  std::string quad, canon, file, out_path;
  std::string format = "json";
  double psi_m = kPi / 6.0;
  double psi_M = 3.0 * kPi / 4.0;
  double flag_c = 2.0;
};

int run_classify(const ClassifyArgs& a, std::ostream& out) {
  if (a.format != "json") {
    throw ParseError("csv format applies to sweep studies");
  }
  njson params{{"psi_m", a.psi_m},
               {"psi_M", a.psi_M},
               {"flag_c", a.flag_c},
               {"format", a.format},
               {"out", a.out_path}};
  njson result;
  if (!a.file.empty()) {
    if (!a.quad.empty() || !a.canon.empty()) {
      throw ParseError("pass exactly one of --quad, --canonical, --quads-file");
    }
    params["quads_file"] = a.file;
    const std::vector<NumberedQuad> quads = read_quads_file(a.file);
    njson reports = njson::array();
    for (const NumberedQuad& nq : quads) {
      reports.push_back(
          njson{{"line", nq.line},
                {"report", report_json(
                               classify(nq.quad, a.psi_m, a.psi_M, a.flag_c))}});
    }
    result = njson{{"count", quads.size()}, {"reports", std::move(reports)}};
  } else {
    const ConvexQuad q = resolve_single_quad(a.quad, a.canon, params);
    result = report_json(classify(q, a.psi_m, a.psi_M, a.flag_c));
  }
  emit_simple(envelope("classify", std::move(params), std::move(result)),
              a.out_path, out);
  return 0;
}

struct InterpArgs {
  std::string quad, canon, file, out_path;
  std::string field = "trig";
  std::string format = "json";
  int k = 2;
  double p = 2.0;
  int quad_order = 0;
};

njson interp_one(const ConvexQuad& q, int k, double p, const Field& u, int qo,
                 bool& all_converged) {
  const BilinearMap bm(q);
  const QkInterpolant qi = qk_interpolate(bm, k, u);
  const NormResult ew = w1p_error(u, qi, p, qo);
  const NormResult el = lp_error(u, qi, p, qo);
  const NormResult sem = wmp_seminorm(u, bm, k + 1, p, qo > 0 ? qo : k + 6);
  const double h = q.h();
  const double dk = std::pow(h, k) * sem.value;
  const bool conv = ew.converged && el.converged && sem.converged;
  all_converged = all_converged && conv;
  return njson{{"h", h},
               {"err_w1p", norm_json(ew)},
               {"err_lp", norm_json(el)},
               {"seminorm_u", norm_json(sem)},
               {"ratio_seminorm", dk > 0.0 ? ew.value / dk : 0.0},
               {"ratio_lp", dk > 0.0 ? el.value / (dk * h) : 0.0},
               {"converged", conv}};
}

int run_interp_error(const InterpArgs& a, std::ostream& out) {
  if (a.format != "json") {
    throw ParseError("csv format applies to sweep studies");
  }
  if (a.k < 1 || a.k > kMaxDegree) {
    throw InvalidIndex("degree k must lie in [1, 10]");
  }
  njson params{{"k", a.k},
               {"p", a.p},
               {"field", a.field},
               {"quad_order", a.quad_order > 0 ? a.quad_order : a.k + 6},
               {"format", a.format},
               {"out", a.out_path}};
  const std::unique_ptr<Field> u = make_field(a.field);
  bool converged = true;
  njson result;
  if (!a.file.empty()) {
    if (!a.quad.empty() || !a.canon.empty()) {
      throw ParseError("pass exactly one of --quad, --canonical, --quads-file");
    }
    params["quads_file"] = a.file;
    njson items = njson::array();
    for (const NumberedQuad& nq : read_quads_file(a.file)) {
      njson one = interp_one(nq.quad, a.k, a.p, *u, a.quad_order, converged);
      one["line"] = nq.line;
      items.push_back(std::move(one));
    }
    result = njson{{"count", items.size()}, {"errors", std::move(items)}};
  } else {
    const ConvexQuad q = resolve_single_quad(a.quad, a.canon, params);
    result = interp_one(q, a.k, a.p, *u, a.quad_order, converged);
  }
  emit_simple(envelope("interp-error", std::move(params), std::move(result)),
              a.out_path, out);
  return converged ? 0 : 1;
}

struct IpArgs {
  std::string quad, canon, out_path;
  std::string format = "json";
  double p = 2.0;
};

CanonicalQuad resolve_family_element(const IpArgs& a) {
  const int sources = (a.quad.empty() ? 0 : 1) + (a.canon.empty() ? 0 : 1);
  if (sources != 1) {
    throw ParseError("pass exactly one of --quad or --canonical");
  }
  if (!a.canon.empty()) return canonical_from_spec(a.canon);
  const std::vector<double> n = parse_numbers(a.quad);
  if (n.size() == 4) return CanonicalQuad(n[0], n[1], n[2], n[3]);
  if (n.size() != 8) {
    throw ParseError("--quad needs 4 family numbers a,b,at,bt or 8 vertex "
                     "coordinates");
  }
  const ConvexQuad q(
      {Point2{n[0], n[1]}, {n[2], n[3]}, {n[4], n[5]}, {n[6], n[7]}});
  const double tol = 1e-12 * q.h();
  if (std::abs(q.vertex(0).x) > tol || std::abs(q.vertex(0).y) > tol ||
      std::abs(q.vertex(1).y) > tol || std::abs(q.vertex(3).x) > tol) {
    throw ParseError(
        "--quad vertices are not in family position K(a,b,at,bt); pass "
        "--canonical");
  }
  return CanonicalQuad(q.vertex(1).x, q.vertex(3).y, q.vertex(2).x,
                       q.vertex(2).y);
}

int run_ip_integral(const IpArgs& a, std::ostream& out) {
  if (a.format != "json") {
    throw ParseError("csv format applies to sweep studies");
  }
  const CanonicalQuad cq = resolve_family_element(a);
  const NormResult r = ip_integral(cq, a.p);
  njson params{{"canonical",
                njson::array({cq.a(), cq.b(), cq.at(), cq.bt()})},
               {"p", a.p},
               {"format", a.format},
               {"out", a.out_path}};
  njson result{{"value", r.value},
               {"converged", r.converged},
               {"est_error", r.est_error},
               {"certificate", cq.certificate()}};
  emit_simple(envelope("ip-integral", std::move(params), std::move(result)),
              a.out_path, out);
  return r.converged ? 0 : 1;
}

struct Cex1Args {
  double p = 2.0;
  std::string grid;
  StudyFlags sf;
};

int run_cex1_cmd(const Cex1Args& a, std::ostream& out) {
  const std::vector<double> grid =
      a.grid.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.025}
                     : grid_from_spec(a.grid);
  const StudyResult res = run_cex1(a.p, grid, a.sf.options());
  njson params{{"p", a.p}, {"grid", grid}, {"field", "cex1"}};
  params.update(a.sf.echo(2));
  return finish_study(res, a.sf, "cex1", std::move(params), out);
}

struct Cex2Args {
  double p = 2.0;
  std::string grid;
  StudyFlags sf;
};

int run_cex2_cmd(const Cex2Args& a, std::ostream& out) {
  std::vector<double> grid;
  if (a.grid.empty()) {
    for (int e = 3; e <= 7; ++e) grid.push_back(0.5 + std::pow(2.0, -e));
  } else {
    grid = grid_from_spec(a.grid);
  }
  const StudyResult res = run_cex2(a.p, grid, a.sf.options());
  njson params{{"p", a.p}, {"grid", grid}, {"field", "cex2"}};
  params.update(a.sf.echo(2));
  return finish_study(res, a.sf, "cex2", std::move(params), out);
}

struct LpUniformArgs {
  int k = 2;
  double p = 2.0;
  int num = 500;
  std::uint64_t seed = 1;
  StudyFlags sf;
};

int run_lp_uniform_cmd(const LpUniformArgs& a, std::ostream& out) {
  const StudyResult res =
      run_lp_uniformity(a.k, a.p, a.num, a.seed, a.sf.options());
  njson params{{"k", a.k},
               {"p", a.p},
               {"num", a.num},
               {"seed", a.seed},
               {"field", a.sf.field}};
  params.update(a.sf.echo(a.k));
  return finish_study(res, a.sf, "lp-uniform", std::move(params), out);
}

struct ConvergenceArgs {
  std::string quad, canon, grid;
  int k = 2;
  double p = 2.0;
  StudyFlags sf;
};

int run_convergence_cmd(const ConvergenceArgs& a, std::ostream& out) {
  njson params{{"k", a.k}, {"p", a.p}};
  const ConvexQuad shape = resolve_single_quad(a.quad, a.canon, params);
  std::vector<double> levels;
  if (a.grid.empty()) {
    for (int j = 0; j < 5; ++j) levels.push_back(shape.h() * std::pow(0.5, j));
  } else {
    levels = grid_from_spec(a.grid);
  }
  const StudyResult res = run_convergence(shape, a.k, a.p, levels, a.sf.options());
  params["grid"] = levels;
  params["field"] = a.sf.field;
  params.update(a.sf.echo(a.k));
  return finish_study(res, a.sf, "convergence", std::move(params), out);
}

struct ConstantSweepArgs {
  std::string style;
  std::string grid;
  int k = 2;
  double p = 2.0;
  StudyFlags sf;
};

int run_constant_sweep_cmd(const ConstantSweepArgs& a, std::ostream& out) {
  const Family style = parse_family(a.style);
  std::vector<double> grid;
  if (a.grid.empty()) {
    grid = style == Family::Cex1 ? std::vector<double>{0.5, 0.25, 0.125, 0.0625}
                                 : std::vector<double>{2.7, 2.85, 3.0, 3.1};
  } else {
    grid = grid_from_spec(a.grid);
  }
  const StudyResult res =
      run_constant_vs_angle(style, a.k, a.p, grid, a.sf.options());
  njson params{{"style", a.style},
               {"k", a.k},
               {"p", a.p},
               {"grid", grid},
               {"field", a.sf.field}};
  params.update(a.sf.echo(a.k));
  return finish_study(res, a.sf, "constant-sweep", std::move(params), out);
}

int run_guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const NoConvergence& e) {
    return emit_error(err, "NoConvergence", e.what(), 1);
  } catch (const ParseError& e) {
    return emit_error(err, "ParseError", e.what(), 2);
  } catch (const GridOutOfRange& e) {
    return emit_error(err, "GridOutOfRange", e.what(), 2);
  } catch (const InvalidIndex& e) {
    return emit_error(err, "InvalidIndex", e.what(), 2);
  } catch (const PreconditionFailed& e) {
    return emit_error(err, "PreconditionFailed", e.what(), 2);
  } catch (const DegenerateQuad& e) {
    return emit_error(err, "DegenerateQuad", e.what(), 2);
  } catch (const ConstructionFailed& e) {
    return emit_error(err, "ConstructionFailed", e.what(), 2);
  } catch (const Error& e) {
    return emit_error(err, "Error", e.what(), 1);
  } catch (const std::exception& e) {
    return emit_error(err, "InternalError", e.what(), 1);
  }
}

}  // namespace

std::vector<NumberedQuad> read_quads_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open quad file");
  std::vector<NumberedQuad> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::vector<double> nums;
    double v = 0.0;
    while (ss >> v) nums.push_back(v);
    if (!ss.eof()) throw ParseError(where + ": malformed number");
    if (nums.empty()) continue;
    if (nums.size() != 8) {
      throw ParseError(where + ": expected 8 coordinates, got " +
                       std::to_string(nums.size()));
    }
    try {
      out.push_back({lineno, ConvexQuad({Point2{nums[0], nums[1]},
                                         {nums[2], nums[3]},
                                         {nums[4], nums[5]},
                                         {nums[6], nums[7]}})});
    } catch (const DegenerateQuad& e) {
      throw DegenerateQuad(where + ": " + e.what());
    }
  }
  return out;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{
      "Q_k interpolation on convex quadrilaterals: geometric classification, "
      "W^{1,p} error norms, and sharpness studies"};
  app.name("quadint");
  app.require_subcommand(1);
  app.footer(kExitLegend);

  std::function<int()> selected;

  ClassifyArgs cl;
  CLI::App* classify_cmd = app.add_subcommand(
      "classify", "Geometric condition report for a quad or a quad file");
  classify_cmd->add_option("--quad", cl.quad,
                           "quad \"x1 y1 x2 y2 x3 y3 x4 y4\" (CCW, convex)");
  classify_cmd->add_option("--canonical", cl.canon,
                           "family element a,b,at,bt");
  classify_cmd->add_option("--quads-file", cl.file,
                           "text file with one quad per line");
  classify_cmd->add_option("--psi-m", cl.psi_m, "minimal-angle threshold")
      ->capture_default_str();
  classify_cmd->add_option("--psi-M", cl.psi_M, "maximal-angle threshold")
      ->capture_default_str();
  classify_cmd->add_option("--flag-c", cl.flag_c, "flag constant threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  classify_cmd->add_option("--format", cl.format, "payload format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  classify_cmd->add_option("--out", cl.out_path, "write the payload here");
  classify_cmd->footer(
      "output: envelope {tool,version,command,params,result}; result = "
      "{psi_min,psi_max,mac,MAC,DAC,rdp{diagonal,ratio_n,psi_max},h_over_rho,"
      "flags{delta1,d1,d2,delta2,d3}:{holds,attained}}; file input wraps the "
      "reports with source line numbers.\n" +
      std::string(kExitLegend));
  classify_cmd->callback([&] { selected = [&] { return run_classify(cl, out); }; });

  InterpArgs ie;
  CLI::App* interp_cmd = app.add_subcommand(
      "interp-error", "Interpolation error norms for one quad or a quad file");
  interp_cmd->add_option("--quad", ie.quad,
                         "quad \"x1 y1 x2 y2 x3 y3 x4 y4\" (CCW, convex)");
  interp_cmd->add_option("--canonical", ie.canon, "family element a,b,at,bt");
  interp_cmd->add_option("--quads-file", ie.file,
                         "text file with one quad per line");
  interp_cmd->add_option("--k", ie.k, "interpolation degree")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  interp_cmd->add_option("--p", ie.p, "Lebesgue exponent")
      ->check(CLI::Range(1.0, 64.0))
      ->capture_default_str();
  interp_cmd->add_option("--field", ie.field,
                         "probe field (cex1, cex2, trig, poly:<rows>)")
      ->capture_default_str();
  interp_cmd->add_option("--quad-order", ie.quad_order,
                         "points per direction for quadrature; 0 selects k + 6")
      ->check(CLI::Range(0, 64))
      ->capture_default_str();
  interp_cmd->add_option("--format", ie.format, "payload format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  interp_cmd->add_option("--out", ie.out_path, "write the payload here");
  interp_cmd->footer(
      "output: envelope whose result = {h, err_w1p, err_lp, seminorm_u "
      "(each {value,order,est_error,converged,near_singular}), "
      "ratio_seminorm, ratio_lp, converged}; exit 1 when any quadrature is "
      "unconverged.\n" +
      std::string(kExitLegend));
  interp_cmd->callback(
      [&] { selected = [&] { return run_interp_error(ie, out); }; });

  IpArgs ip;
  CLI::App* ip_cmd = app.add_subcommand(
      "ip-integral", "Reference integral I_p over a family element");
  ip_cmd->add_option("--quad", ip.quad,
                     "family element a,b,at,bt or 8 vertex coordinates in "
                     "family position");
  ip_cmd->add_option("--canonical", ip.canon, "family element a,b,at,bt");
  ip_cmd->add_option("--p", ip.p, "Lebesgue exponent")
      ->check(CLI::Range(1.0, 64.0))
      ->capture_default_str();
  ip_cmd->add_option("--format", ip.format, "payload format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  ip_cmd->add_option("--out", ip.out_path, "write the payload here");
  ip_cmd->footer(
      "output: envelope whose result = {value, converged, est_error, "
      "certificate}; exit 1 when the quadrature is unconverged.\n" +
      std::string(kExitLegend));
  ip_cmd->callback([&] { selected = [&] { return run_ip_integral(ip, out); }; });

  Cex1Args c1;
  CLI::App* cex1_cmd = app.add_subcommand(
      "cex1", "Minimal-angle sharpness sweep on K(1,s,s,2s), k = 2");
  cex1_cmd->add_option("--p", c1.p, "Lebesgue exponent, 1 <= p < 3")
      ->capture_default_str();
  cex1_cmd->add_option("--grid", c1.grid,
                       "s values in (0, 1/2); default \"0.2 0.1 0.05 0.025\"");
  c1.sf.attach(cex1_cmd, false);
  cex1_cmd->footer(
      "json result = {summary{study,k,p,slope,residual,verdict}, max_ratio, "
      "warnings, rows, csv}; csv columns param,h,err_w1p,err_lp,semnorm_u,"
      "ratio_seminorm,ratio_lp,aux1,aux2,converged with aux1 = "
      "|d phi_11/dy|_{0,p,K} and aux2 = |d Q_2 u/dy|_{0,p,K}.\n" +
      std::string(kExitLegend));
  cex1_cmd->callback([&] { selected = [&] { return run_cex1_cmd(c1, out); }; });

  Cex2Args c2;
  CLI::App* cex2_cmd = app.add_subcommand(
      "cex2", "Maximal-angle sharpness sweep on K(1,1,s,s), k = 2");
  cex2_cmd->add_option("--p", c2.p, "Lebesgue exponent in [1, 64]")
      ->capture_default_str();
  cex2_cmd->add_option(
      "--grid", c2.grid,
      "s values in (1/2, 5/8]; default 1/2 + 2^-e for e = 3..7");
  c2.sf.attach(cex2_cmd, false);
  cex2_cmd->footer(
      "json result as for cex1 with aux1 = |d phi_22/dy|_{0,p,K} and aux2 = "
      "|u(M_22)|; p > 3 certifies the power law, p = 3 monotone growth, "
      "p < 3 runs as a boundedness control.\n" +
      std::string(kExitLegend));
  cex2_cmd->callback([&] { selected = [&] { return run_cex2_cmd(c2, out); }; });

  LpUniformArgs lu;
  CLI::App* lp_cmd = app.add_subcommand(
      "lp-uniform", "L^p error-ratio uniformity over random convex quads");
  lp_cmd->add_option("--k", lu.k, "interpolation degree")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  lp_cmd->add_option("--p", lu.p, "Lebesgue exponent")
      ->check(CLI::Range(1.0, 64.0))
      ->capture_default_str();
  lp_cmd->add_option("--num", lu.num, "number of random quads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  lp_cmd->add_option("--seed", lu.seed, "random seed")->capture_default_str();
  lu.sf.attach(lp_cmd, true);
  lp_cmd->footer(
      "json result as for cex1; max_ratio is the largest ratio_lp over the "
      "sweep (random quads plus four near-degenerate family shapes); aux "
      "columns are the min/max interior angles.\n" +
      std::string(kExitLegend));
  lp_cmd->callback(
      [&] { selected = [&] { return run_lp_uniform_cmd(lu, out); }; });

  ConvergenceArgs cv;
  CLI::App* conv_cmd = app.add_subcommand(
      "convergence", "Dyadic h-refinement rates on a fixed shape");
  conv_cmd->add_option("--quad", cv.quad,
                       "quad \"x1 y1 x2 y2 x3 y3 x4 y4\" (CCW, convex)");
  conv_cmd->add_option("--canonical", cv.canon, "family element a,b,at,bt");
  conv_cmd->add_option("--k", cv.k, "interpolation degree")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  conv_cmd->add_option("--p", cv.p, "Lebesgue exponent")
      ->check(CLI::Range(1.0, 64.0))
      ->capture_default_str();
  conv_cmd->add_option("--grid", cv.grid,
                       "h levels; default 5 dyadic halvings of the diameter");
  cv.sf.attach(conv_cmd, true);
  conv_cmd->footer(
      "fits err_w1p/|u|_{k+1,p} ~ h^k and err_lp/|u|_{k+1,p} ~ h^{k+1}; "
      "verdict CONVERGED requires both slopes within 0.1; aux columns are "
      "the min/max interior angles; a sufficient-condition violation for "
      "the (k,p) regime is reported as a warning.\n" +
      std::string(kExitLegend));
  conv_cmd->callback(
      [&] { selected = [&] { return run_convergence_cmd(cv, out); }; });

  ConstantSweepArgs cs;
  CLI::App* sweep_cmd = app.add_subcommand(
      "constant-sweep", "Empirical constant against the extreme angle");
  sweep_cmd
      ->add_option("--style", cs.style,
                   "cex1 sweeps the minimal angle, cex2 the maximal angle")
      ->required()
      ->check(CLI::IsMember({"cex1", "cex2"}));
  sweep_cmd->add_option("--k", cs.k, "interpolation degree")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  sweep_cmd->add_option("--p", cs.p, "Lebesgue exponent")
      ->check(CLI::Range(1.0, 64.0))
      ->capture_default_str();
  sweep_cmd->add_option(
      "--grid", cs.grid,
      "angles in radians; defaults \"0.5 0.25 0.125 0.0625\" (cex1) or "
      "\"2.7 2.85 3.0 3.1\" (cex2)");
  cs.sf.attach(sweep_cmd, true);
  sweep_cmd->footer(
      "C_emp = err_w1p/(h^k |u|_{k+1,p}) per angle; aux1 is the family "
      "parameter s, aux2 the attained extreme angle; verdict BOUNDED when "
      "the spread stays under 2x, DIVERGES when the degenerate end exceeds "
      "4x the tame end.\n" +
      std::string(kExitLegend));
  sweep_cmd->callback(
      [&] { selected = [&] { return run_constant_sweep_cmd(cs, out); }; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return emit_error(err, "UsageError",
                      std::string(e.get_name()) + ": " + e.what(), 2);
  }
  if (!selected) {
    return emit_error(err, "UsageError", "a subcommand is required", 2);
  }
  return run_guarded(selected, err);
}

}  // namespace quadint::cli
