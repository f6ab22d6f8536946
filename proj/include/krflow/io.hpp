#pragma once

#include <string>
#include <vector>

#include "krflow/base_geometry.hpp"
#include "krflow/flow_solver.hpp"
#include "krflow/model_metrics.hpp"
#include "krflow/radial_profile.hpp"

namespace krf::io {

// shortest text that parses back to the same double
std::string format_double(double x);

std::string profile_csv(const RadialProfile& profile);
RadialProfile profile_from_csv(const std::string& text);

std::string profile_json(const RadialProfile& profile, const BaseGeometry& base);
// returns the profile; base receives the "base" object when non-null
RadialProfile profile_from_json(const std::string& text, BaseGeometry* base = nullptr);

std::string base_json(const BaseGeometry& base);
BaseGeometry base_from_json(const std::string& text);

// two columns s,B with s ascending from 0
std::string b_csv(const BFunction& B);
BFunction b_from_csv(const std::string& text);

std::string read_file(const std::string& path);
// writes path.tmp and renames it over path; nothing is left behind on failure
void write_file_atomic(const std::string& path, const std::string& content);

struct NamedText {
  std::string name;
  std::string content;
};

// slice_<k>.csv per recorded time, then index.csv listing time,filename,min_psi,min_phi
std::vector<NamedText> trajectory_files(const FlowTrajectory& traj, const std::string& prefix = "");

struct TrajectoryExport {
  std::vector<std::string> files;  // slice files then the index, all inside the directory
};

TrajectoryExport export_trajectory(const FlowTrajectory& traj, const std::string& directory,
                                   const std::string& prefix = "");

}  // namespace krf::io
