#include "krflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "krflow/errors.hpp"

namespace krf::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view cell, int line) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    fail(ErrorKind::Io, "line " + std::to_string(line) + ": not a number: '" + std::string(cell) + "'");
  return v;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

// rows of a CSV with the given header, every row the same width
std::vector<std::vector<double>> parse_table(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || strip(line) != header)
    fail(ErrorKind::Io, "expected header '" + header + "'");
  const auto width = static_cast<size_t>(std::count(header.begin(), header.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), lineno));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() != width)
      fail(ErrorKind::Io, "line " + std::to_string(lineno) + ": expected " + std::to_string(width) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

json base_to_json(const BaseGeometry& b) {
  return json{{"n", b.n}, {"lambda", b.lambda}, {"mu", b.mu}, {"orbifold_k", b.orbifold_k}};
}

BaseGeometry base_from(const json& j) {
  BaseGeometry b;
  b.n = j.at("n").get<int>();
  b.lambda = j.at("lambda").get<double>();
  b.mu = j.value("mu", 1);
  b.orbifold_k = j.value("orbifold_k", 1);
  b.validate();
  return b;
}

}  // namespace

std::string profile_csv(const RadialProfile& p) {
  std::string out = "rho,phi,psi\n";
  for (int i = 0; i < p.size(); ++i)
    out += format_double(p.rho()[i]) + ',' + format_double(p.phi()[i]) + ',' + format_double(p.psi()[i]) + '\n';
  return out;
}

RadialProfile profile_from_csv(const std::string& text) {
  auto rows = parse_table(text, "rho,phi,psi");
  std::vector<double> rho, phi, psi;
  for (auto& r : rows) {
    rho.push_back(r[0]);
    phi.push_back(r[1]);
    psi.push_back(r[2]);
  }
  return RadialProfile(std::move(rho), std::move(phi), std::move(psi));
}

std::string profile_json(const RadialProfile& p, const BaseGeometry& base) {
  json j;
  j["base"] = base_to_json(base);
  j["rho_grid"] = p.rho();
  j["phi"] = p.phi();
  j["psi"] = p.psi();
  return j.dump(1) + "\n";
}

RadialProfile profile_from_json(const std::string& text, BaseGeometry* base) {
  try {
    auto j = json::parse(text);
    if (base) *base = base_from(j.at("base"));
    return RadialProfile(j.at("rho_grid").get<std::vector<double>>(), j.at("phi").get<std::vector<double>>(),
                         j.at("psi").get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, std::string("profile json: ") + e.what());
  }
}

std::string base_json(const BaseGeometry& base) { return base_to_json(base).dump() + "\n"; }

BaseGeometry base_from_json(const std::string& text) {
  try {
    return base_from(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, std::string("base json: ") + e.what());
  }
}

std::string b_csv(const BFunction& B) {
  std::string out = "s,B\n";
  for (auto& row : B.table()) out += format_double(row[0]) + ',' + format_double(row[1]) + '\n';
  return out;
}

BFunction b_from_csv(const std::string& text) {
  auto rows = parse_table(text, "s,B");
  std::vector<double> s, b;
  for (auto& r : rows) {
    s.push_back(r[0]);
    b.push_back(r[1]);
  }
  return BFunction::from_table(s, b);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::remove(tmp.c_str());
      fail(ErrorKind::Io, "short write to " + tmp);
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    fail(ErrorKind::Io, "rename " + tmp + ": " + ec.message());
  }
}

std::vector<NamedText> trajectory_files(const FlowTrajectory& traj, const std::string& prefix) {
  std::vector<NamedText> out;
  std::string index = "time,filename,min_psi,min_phi\n";
  for (size_t k = 0; k < traj.profiles.size(); ++k) {
    const auto& p = traj.profiles[k];
    std::string name = prefix + "slice_" + std::to_string(k) + ".csv";
    index += format_double(traj.times[k]) + ',' + name + ',' + format_double(p.min_psi()) + ',' +
             format_double(p.min_phi()) + '\n';
    out.push_back({std::move(name), profile_csv(p)});
  }
  out.push_back({prefix + "index.csv", std::move(index)});
  return out;
}

TrajectoryExport export_trajectory(const FlowTrajectory& traj, const std::string& directory,
                                   const std::string& prefix) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + directory + ": " + ec.message());
  TrajectoryExport out;
  for (auto& f : trajectory_files(traj, prefix)) {
    write_file_atomic((fs::path(directory) / f.name).string(), f.content);
    out.files.push_back(f.name);
  }
  return out;
}

}  // namespace krf::io
