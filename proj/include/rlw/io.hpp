#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "rlw/profile_solver.hpp"
#include "rlw/surface_assembler.hpp"
#include "rlw/verifier.hpp"

namespace rlw {

// alpha,u,du with 14 significant digits, LF line endings, +-inf spelled inf.
// Rows that collide in alpha at that precision are merged.
void write_profile_csv(std::ostream& os, const ProfileTable& table);
ProfileTable read_profile_csv(std::istream& is);
std::string format_number(double x);

// The table exactly as it reads back from CSV.
ProfileTable quantize(const ProfileTable& table);

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;  // 0-based
};

// Revolves an (alpha, u) polyline about the u-axis; points with alpha = 0 become single pole vertices.
// The v = 0 seam ring is duplicated at v = 2 pi.
Mesh revolve(const std::vector<Eigen::Vector2d>& profile, int segments = 96);
void write_obj(std::ostream& os, const Mesh& mesh);
Mesh read_obj(std::istream& is);

nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const Classification& cls);
nlohmann::json to_json(const AssembledSurface& surface);
nlohmann::json to_json(const SolveRequest& req);
nlohmann::json to_json(const DomainInterval& domain);

}  // namespace rlw
