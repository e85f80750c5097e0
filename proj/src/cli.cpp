#include "rlw/cli.hpp"

#include <spdlog/cfg/env.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "rlw/errors.hpp"
#include "rlw/io.hpp"
#include "rlw/surface_assembler.hpp"
#include "rlw/verifier.hpp"

namespace rlw {

namespace {

struct JobConfig {
  int m = 2;
  std::string form = "auto";
  std::string lambda = "0";
  std::string mu = "0";
  std::optional<double> c1;
  std::optional<double> c2;
  double offset = 0.0;
  int sign = 1;
  int samples = 512;
  std::size_t interval = 0;
  double epsilon = 1e-3;
  double tol = 1e-6;
  bool json = false;
  std::string recipe = "auto";
  double base = 0.0;
  std::string csv, obj, meta, profile, report;
  int segments = 96;
  int periods = 1;
  double from = 0.1, to = 0.9;
  int steps = 20;
};

// Accepts plain numbers and fractions such as -1/3.
double parse_real(const std::string& s) {
  const auto slash = s.find('/');
  std::size_t used = 0;
  if (slash == std::string::npos) {
    const double v = std::stod(s, &used);
    if (used != s.size()) throw PreconditionError("not a number: " + s);
    return v;
  }
  const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
  const double num = std::stod(a, &used);
  if (used != a.size()) throw PreconditionError("not a number: " + s);
  const double den = std::stod(b, &used);
  if (used != b.size() || den == 0.0) throw PreconditionError("not a fraction: " + s);
  return num / den;
}

SolveRequest make_request(const JobConfig& c) {
  SolveRequest req;
  req.p = NormParameter(c.m);
  const double lambda = parse_real(c.lambda), mu = parse_real(c.mu);
  if (c.form == "auto")
    req.relation = WeingartenRelation::from_coefficients(lambda, mu);
  else if (c.form == "k1-zero")
    req.relation = WeingartenRelation::k1_zero();
  else if (c.form == "k2-const")
    req.relation = WeingartenRelation::k2_const(mu);
  else if (c.form == "k1-const")
    req.relation = WeingartenRelation::k1_const(mu);
  else
    throw PreconditionError("unknown relation form " + c.form);
  if (req.relation.form == RelationForm::Homogeneous)
    req.c1 = c.c2.value_or(c.c1.value_or(1.0));
  else
    req.c1 = c.c1.value_or(c.c2.value_or(0.0));
  req.offset = c.offset;
  if (c.sign != 1 && c.sign != -1) throw PreconditionError("sign must be 1 or -1");
  req.sign = c.sign;
  req.samples = c.samples;
  return req;
}

std::string short_number(double x) {
  if (std::isinf(x)) return x > 0 ? "∞" : "-∞";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << content;
}

int cmd_classify(const JobConfig& c, std::ostream& out) {
  const SolveRequest req = make_request(c);
  const Classification cls = classify(req);
  for (const auto& w : cls.warnings) spdlog::warn("{}", w);
  if (c.json) {
    out << to_json(cls).dump(2) << '\n';
    return 0;
  }
  for (const auto& ci : cls.intervals)
    out << to_string(ci.tag) << ", domain (" << short_number(ci.domain.lower) << ", " << short_number(ci.domain.upper)
        << "), endpoints " << to_string(ci.domain.lower_kind) << "/" << to_string(ci.domain.upper_kind) << '\n';
  for (const auto& w : cls.warnings) out << "warning: " << w << '\n';
  return 0;
}

const ProfileBranch& primary_branch(const AssembledSurface& s, int sign) {
  for (const auto& b : s.branches)
    if (b.sign() == sign && (s.recipe == Recipe::Cap || b.request.relation.mu > 0)) return b;
  return s.branches.front();
}

int cmd_generate(const JobConfig& c, std::ostream& out) {
  SolveRequest req = make_request(c);
  AssembledSurface surface;
  Classification cls;
  if (c.recipe == "auto" || c.recipe == "none" || c.recipe == "Cap") {
    cls = classify(req);
    if (c.interval >= cls.intervals.size()) throw PreconditionError("interval index out of range");
    const DomainInterval& d = cls.intervals[c.interval].domain;
    const bool root = d.lower_kind == EndpointKind::SimpleRoot || d.upper_kind == EndpointKind::SimpleRoot;
    if (c.recipe == "Cap" || (c.recipe == "auto" && root))
      surface = assemble_cap(req, c.interval);
    else
      surface = assemble_branch(solve(req, c.interval));
  } else {
    const auto recipe = recipe_from_string(c.recipe);
    if (!recipe) throw PreconditionError("unknown recipe " + c.recipe);
    RecipeParams prm;
    prm.p = req.p;
    prm.lambda = parse_real(c.lambda);
    prm.mu = parse_real(c.mu);
    if (prm.mu == 0.0) prm.mu = 1.0;
    prm.c1 = req.c1;
    prm.base = c.base;
    prm.samples = c.samples;
    surface = assemble(*recipe, prm);
    cls = classify(primary_branch(surface, c.sign).request);
  }
  for (const auto& w : cls.warnings) spdlog::warn("{}", w);
  const ProfileBranch& br = primary_branch(surface, c.sign);
  const ProfileTable table = table_of(br);
  const VerificationReport stats =
      residual_scan_table(quantize(table), br.request.p, br.request.relation, {}, c.epsilon, c.tol);

  if (!c.csv.empty()) {
    std::ostringstream os;
    write_profile_csv(os, table);
    write_file(c.csv, os.str());
  }
  if (!c.obj.empty()) {
    std::ostringstream os;
    write_obj(os, revolve(profile_polyline(surface, c.periods), c.segments));
    write_file(c.obj, os.str());
  }
  nlohmann::json meta = {{"schema_version", kReportSchemaVersion},
                         {"kind", "generate"},
                         {"request", to_json(br.request)},
                         {"case_tag", std::string(to_string(br.tag))},
                         {"domain", to_json(br.domain)},
                         {"u_lower", format_number(br.u_lower)},
                         {"u_upper", format_number(br.u_upper)},
                         {"error_estimate", br.error_estimate},
                         {"classification_warnings", cls.warnings},
                         {"surface", to_json(surface)},
                         {"table_residual",
                          {{"residual_max", stats.residual_max},
                           {"residual_rms", stats.residual_rms},
                           {"evaluated", stats.evaluated},
                           {"epsilon", c.epsilon}}}};
  if (!c.meta.empty()) write_file(c.meta, meta.dump(2) + "\n");
  if (c.json)
    out << meta.dump(2) << '\n';
  else
    out << to_string(br.tag) << " " << to_string(surface.topology) << " residual_max " << format_number(stats.residual_max)
        << '\n';
  return 0;
}

int cmd_verify(const JobConfig& c, std::ostream& out) {
  VerificationReport rep;
  if (!c.profile.empty()) {
    std::ifstream is(c.profile, std::ios::binary);
    if (!is) throw FormatError("cannot open " + c.profile);
    const ProfileTable table = read_profile_csv(is);
    const SolveRequest req = make_request(c);
    rep = residual_scan_table(table, req.p, req.relation, {}, c.epsilon, c.tol);
    rep.branch_id = c.profile;
  } else {
    rep = verify_branch(solve(make_request(c), c.interval), c.epsilon, c.tol);
  }
  for (const auto& w : rep.warnings) spdlog::warn("{}", w);
  const std::string text = to_json(rep).dump(2) + "\n";
  if (!c.report.empty())
    write_file(c.report, text);
  else
    out << text;
  return rep.passed() ? 0 : 1;
}

int cmd_scan(const JobConfig& c, std::ostream& out) {
  const auto recipe = recipe_from_string(c.recipe);
  if (!recipe || *recipe == Recipe::Cap || *recipe == Recipe::Torus4iii)
    throw PreconditionError("scan-coincidence needs a two-family recipe such as C3");
  if (c.steps < 2) throw PreconditionError("scan-coincidence needs at least 2 steps");
  out << "c1,d_first,d_second,difference,near_coincidence\n";
  double prev_c = 0.0, prev_diff = std::nan("");
  for (int i = 0; i < c.steps; ++i) {
    RecipeParams prm;
    prm.p = NormParameter(c.m);
    prm.lambda = parse_real(c.lambda);
    prm.mu = parse_real(c.mu);
    if (prm.mu == 0.0) prm.mu = 1.0;
    prm.c1 = c.from + (c.to - c.from) * i / (c.steps - 1);
    prm.base = c.base;
    prm.samples = 64;
    double d1 = std::nan(""), d2 = std::nan("");
    try {
      const AssembledSurface s = assemble(*recipe, prm);
      d1 = s.d_values.at(0).value;
      d2 = s.d_values.at(1).value;
    } catch (const Error& e) {
      spdlog::debug("c1 = {}: {}", prm.c1, e.what());
    }
    const double diff = d1 - d2;
    out << format_number(prm.c1) << ',' << format_number(d1) << ',' << format_number(d2) << ',' << format_number(diff)
        << ',' << (std::abs(diff) < 1e-9 ? 1 : 0) << '\n';
    if (std::isfinite(diff) && std::isfinite(prev_diff) && (diff > 0) != (prev_diff > 0))
      spdlog::info("difference changes sign between c1 = {} and c1 = {}", prev_c, prm.c1);
    prev_c = prm.c1;
    prev_diff = diff;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("rlw", sink);
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  spdlog::cfg::load_env_levels();

  JobConfig c;
  CLI::App app{"Rotational linear Weingarten surfaces in a normed 3-space"};
  app.set_config("--config", "", "flat key = value configuration file");
  app.require_subcommand(1);
  app.add_option("--m", c.m, "norm exponent m >= 1")->capture_default_str();
  app.add_option("--form", c.form, "relation form")
      ->check(CLI::IsMember({"auto", "k1-zero", "k2-const", "k1-const"}))
      ->capture_default_str();
  app.add_option("--lambda", c.lambda, "lambda in k1 + lambda k2 = mu (fractions allowed)")->capture_default_str();
  app.add_option("--mu", c.mu, "mu in k1 + lambda k2 = mu (fractions allowed)")->capture_default_str();
  app.add_option("--c1", c.c1, "first integration constant");
  app.add_option("--c2", c.c2, "homogeneous integration constant");
  app.add_option("--offset", c.offset, "additive constant of the profile")->capture_default_str();
  app.add_option("--sign", c.sign, "branch sign, 1 or -1")->capture_default_str();
  app.add_option("--samples", c.samples, "samples per branch")->capture_default_str();
  app.add_option("--interval", c.interval, "admissible interval index")->capture_default_str();
  app.add_option("--epsilon", c.epsilon, "endpoint exclusion radius")->capture_default_str();
  app.add_option("--tol", c.tol, "residual tolerance")->capture_default_str();
  app.add_flag("--json", c.json, "print JSON");
  app.add_option("--recipe", c.recipe, "gluing recipe: auto, none, Cap, C1-1 ... C10, Torus4iii")->capture_default_str();
  app.add_option("--base", c.base, "additive constant of the second family")->capture_default_str();
  app.add_option("--csv", c.csv, "profile CSV output");
  app.add_option("--obj", c.obj, "OBJ mesh output");
  app.add_option("--meta", c.meta, "JSON metadata output");
  app.add_option("--segments", c.segments, "mesh segments around the axis")->capture_default_str();
  app.add_option("--periods", c.periods, "periods written for periodic surfaces")->capture_default_str();
  app.add_option("--profile", c.profile, "profile CSV to verify");
  app.add_option("--report", c.report, "verification report output");
  app.add_option("--from", c.from, "scan start for c1")->capture_default_str();
  app.add_option("--to", c.to, "scan end for c1")->capture_default_str();
  app.add_option("--steps", c.steps, "scan steps")->capture_default_str();

  auto* classify_cmd = app.add_subcommand("classify", "print case tags and admissible intervals")->fallthrough();
  auto* generate_cmd = app.add_subcommand("generate", "write profile CSV, OBJ mesh and JSON metadata")->fallthrough();
  auto* verify_cmd = app.add_subcommand("verify", "verify a profile and write a JSON report")->fallthrough();
  auto* scan_cmd = app.add_subcommand("scan-coincidence", "tabulate d-constant differences over c1")->fallthrough();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 1;
  }
  try {
    if (classify_cmd->parsed()) return cmd_classify(c, out);
    if (generate_cmd->parsed()) return cmd_generate(c, out);
    if (verify_cmd->parsed()) return cmd_verify(c, out);
    if (scan_cmd->parsed()) return cmd_scan(c, out);
  } catch (const NoSurface& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    err << "error: malformed profile: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace rlw
