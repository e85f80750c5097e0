#include "rlw/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "rlw/errors.hpp"

namespace rlw {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.14g", x);
  return buf;
}

void write_profile_csv(std::ostream& os, const ProfileTable& t) {
  // rows whose alpha prints like its predecessor are dropped; the end rows are kept
  const Eigen::Index n = t.alpha.size();
  std::vector<Eigen::Index> rows;
  std::string last;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string a = format_number(t.alpha(i));
    if (!rows.empty() && a == last) {
      if (i == n - 1 && rows.size() > 1) rows.back() = i;
      continue;
    }
    rows.push_back(i);
    last = a;
  }
  os << "alpha,u,du\n";
  for (Eigen::Index i : rows)
    os << format_number(t.alpha(i)) << ',' << format_number(t.u(i)) << ',' << format_number(t.du(i)) << '\n';
}

namespace {

double parse_cell(const std::string& cell, std::size_t line, int col) {
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || std::isnan(v))
    throw FormatError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": '" + cell +
                      "' is not a number");
  return v;
}

}  // namespace

ProfileTable read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty profile file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "alpha,u,du") throw FormatError("line 1: expected header 'alpha,u,du'");
  std::vector<double> a, u, du;
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 3) throw FormatError("line " + std::to_string(n) + ": expected 3 columns");
    const double x = parse_cell(cells[0], n, 1), y = parse_cell(cells[1], n, 2), z = parse_cell(cells[2], n, 3);
    if (!std::isfinite(x) || x < 0) throw FormatError("line " + std::to_string(n) + ": alpha must be finite and >= 0");
    if (!std::isfinite(y)) throw FormatError("line " + std::to_string(n) + ": u must be finite");
    if (!a.empty() && !(x > a.back())) throw FormatError("line " + std::to_string(n) + ": alpha must increase");
    a.push_back(x);
    u.push_back(y);
    du.push_back(z);
  }
  if (a.empty()) throw FormatError("profile file has no rows");
  ProfileTable t;
  t.alpha = Eigen::Map<Eigen::ArrayXd>(a.data(), Eigen::Index(a.size()));
  t.u = Eigen::Map<Eigen::ArrayXd>(u.data(), Eigen::Index(u.size()));
  t.du = Eigen::Map<Eigen::ArrayXd>(du.data(), Eigen::Index(du.size()));
  return t;
}

ProfileTable quantize(const ProfileTable& t) {
  std::stringstream ss;
  write_profile_csv(ss, t);
  return read_profile_csv(ss);
}

Mesh revolve(const std::vector<Eigen::Vector2d>& profile, int segments) {
  if (segments < 3) throw PreconditionError("revolve needs at least 3 segments");
  if (profile.size() < 2) throw PreconditionError("revolve needs at least 2 profile points");
  Mesh mesh;
  std::vector<int> start;
  std::vector<bool> pole;
  for (const auto& q : profile) {
    start.push_back(int(mesh.vertices.size()));
    const bool is_pole = q(0) == 0.0;
    pole.push_back(is_pole);
    if (is_pole) {
      mesh.vertices.emplace_back(0.0, 0.0, q(1));
      continue;
    }
    for (int j = 0; j <= segments; ++j) {
      const double th = 2.0 * M_PI * (j == segments ? 0 : j) / segments;
      mesh.vertices.emplace_back(q(0) * std::cos(th), q(0) * std::sin(th), q(1));
    }
  }
  std::size_t widest = 0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (profile[i](0) > profile[widest](0)) widest = i;
  double radial = 0.0;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    if (pole[i] && pole[i + 1]) continue;
    const bool near_widest = i == widest || i + 1 == widest;
    for (int j = 0; j < segments; ++j) {
      const int a0 = pole[i] ? start[i] : start[i] + j, a1 = pole[i] ? start[i] : start[i] + j + 1;
      const int b0 = pole[i + 1] ? start[i + 1] : start[i + 1] + j, b1 = pole[i + 1] ? start[i + 1] : start[i + 1] + j + 1;
      if (!pole[i]) mesh.faces.push_back({a0, b0, a1});
      if (!pole[i + 1]) mesh.faces.push_back({a1, b0, b1});
      if (!near_widest) continue;
      const Eigen::Vector3d& p0 = mesh.vertices[mesh.faces.back()[0]];
      const Eigen::Vector3d n =
          (mesh.vertices[mesh.faces.back()[1]] - p0).cross(mesh.vertices[mesh.faces.back()[2]] - p0);
      radial += n(0) * p0(0) + n(1) * p0(1);
    }
  }
  // outward: normals at the widest profile point face away from the axis
  if (radial < 0)
    for (auto& f : mesh.faces) std::swap(f[1], f[2]);
  return mesh;
}

void write_obj(std::ostream& os, const Mesh& mesh) {
  for (const auto& v : mesh.vertices)
    os << "v " << format_number(v(0)) << ' ' << format_number(v(1)) << ' ' << format_number(v(2)) << '\n';
  for (const auto& f : mesh.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

Mesh read_obj(std::istream& is) {
  Mesh mesh;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      Eigen::Vector3d v;
      ss >> v(0) >> v(1) >> v(2);
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> f{};
      ss >> f[0] >> f[1] >> f[2];
      for (int& i : f) --i;
      mesh.faces.push_back(f);
    }
  }
  return mesh;
}

namespace {

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json limit_json(const OneSidedLimit& l) { return {{"exists", l.exists}, {"value", number(l.value)}, {"error", number(l.error)}}; }

json axis_json(const AxisLimitReport& a) {
  return {{"u2_limit_exists", a.u2_limit_exists}, {"curvatures_extend", a.curvatures_extend},
          {"u2_limit", number(a.u2_limit)},       {"k1_limit", number(a.k1_limit)},
          {"k2_limit", number(a.k2_limit)},       {"k1_gap", number(a.k1_gap)},
          {"k2_gap", number(a.k2_gap)}};
}

}  // namespace

json to_json(const DomainInterval& d) {
  return {{"lower", number(d.lower)},
          {"upper", number(d.upper)},
          {"lower_kind", to_string(d.lower_kind)},
          {"upper_kind", to_string(d.upper_kind)}};
}

json to_json(const SolveRequest& r) {
  return {{"m", r.p.m()},
          {"form", to_string(r.relation.form)},
          {"lambda", number(r.relation.lambda)},
          {"mu", number(r.relation.mu)},
          {"c1", number(r.c1)},
          {"offset", number(r.offset)},
          {"sign", r.sign},
          {"samples", r.samples}};
}

json to_json(const VerificationReport& r) {
  json zones = json::array();
  for (const auto& z : r.excluded_zones)
    zones.push_back({{"lower", number(z.lower)}, {"upper", number(z.upper)}, {"reason", z.reason}});
  json j = {{"schema_version", kReportSchemaVersion},
            {"kind", "verification_report"},
            {"branch_id", r.branch_id},
            {"case_tag", r.case_tag},
            {"epsilon", r.epsilon},
            {"tol", r.tol},
            {"residual_max", number(r.residual_max)},
            {"residual_rms", number(r.residual_rms)},
            {"evaluated", r.evaluated},
            {"excluded_zones", zones},
            {"oracle", {{"checked", r.oracle_checked}, {"max_deviation", number(r.oracle_max_dev)}, {"compared", r.oracle_compared}}},
            {"first_integral_drift", number(r.first_integral_drift)},
            {"axis_limits", r.axis_limits ? axis_json(*r.axis_limits) : json(nullptr)},
            {"warnings", r.warnings},
            {"passed", r.passed()}};
  return j;
}

json to_json(const Classification& c) {
  json iv = json::array();
  for (const auto& ci : c.intervals) {
    json d = to_json(ci.domain);
    d["case_tag"] = std::string(to_string(ci.tag));
    iv.push_back(d);
  }
  return {{"schema_version", kReportSchemaVersion}, {"kind", "classification"}, {"intervals", iv}, {"warnings", c.warnings}};
}

json to_json(const AssembledSurface& s) {
  json branches = json::array();
  for (std::size_t i = 0; i < s.branches.size(); ++i) {
    const ProfileBranch& b = s.branches[i];
    branches.push_back({{"id", b.id()},
                        {"case_tag", std::string(to_string(b.tag))},
                        {"sign", b.sign()},
                        {"offset", number(b.request.offset)},
                        {"orientation", s.orientation[i]},
                        {"reversed", bool(s.reversed[i])},
                        {"domain", to_json(b.domain)},
                        {"u_lower", number(b.u_lower)},
                        {"u_upper", number(b.u_upper)}});
  }
  auto junction = [](const Junction& j) {
    return json{{"alpha_star", number(j.alpha_star)},
                {"left", j.left},
                {"right", j.right},
                {"left_flag", j.left_flag},
                {"right_flag", j.right_flag},
                {"inverted_chart", j.inverted_chart},
                {"value_gap", number(j.value_gap)},
                {"slope_gap", number(j.slope_gap)},
                {"d2_left", limit_json(j.d2_left)},
                {"d2_right", limit_json(j.d2_right)},
                {"k1_left", limit_json(j.k1_left)},
                {"k1_right", limit_json(j.k1_right)},
                {"k1_jump", number(j.k1_jump)},
                {"relation_preserved", j.relation_preserved},
                {"shift", number(j.shift)},
                {"smoothness", to_string(j.smoothness)}};
  };
  json js = json::array();
  for (const auto& j : s.junctions) js.push_back(junction(j));
  json axis = json::array();
  for (const auto& a : s.axis_points)
    axis.push_back({{"branch", a.branch},
                    {"u", number(a.u)},
                    {"analytic", {{"u2_limit_exists", a.analytic.u2_limit_exists}, {"curvatures_extend", a.analytic.curvatures_extend}}},
                    {"numeric", axis_json(a.numeric)}});
  json dv = json::array();
  for (const auto& d : s.d_values) dv.push_back({{"name", d.name}, {"value", number(d.value)}, {"error", number(d.error)}});
  return {{"recipe", to_string(s.recipe)},
          {"topology", to_string(s.topology)},
          {"branches", branches},
          {"junctions", js},
          {"closure", s.closure ? junction(*s.closure) : json(nullptr)},
          {"period", s.period ? number(*s.period) : json(nullptr)},
          {"may_be_torus", s.may_be_torus},
          {"axis_points", axis},
          {"d_values", dv},
          {"warnings", s.warnings}};
}

}  // namespace rlw
