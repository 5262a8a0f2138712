#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dtnfem/history_io.hpp"
#include "dtnfem/vtk_io.hpp"

using namespace dtnfem;
namespace fs = std::filesystem;

namespace {

void check_close(Complex got, Complex want, double tol = 1e-13) { CHECK(std::abs(got - want) <= tol * std::abs(want)); }

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Drops the trailing wall-time column.
std::string without_time(const std::string& line) { return line.substr(0, line.rfind(',')); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + DTNFEM_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("example 1 boundary data") {
  check_close(boundary_data_example1(Vec3(0.5, 0.0, 0.0), kPi), Complex(2.0 * kPi, 4.0));
  check_close(boundary_data_example1(Vec3(0.0, -0.3, 0.4), kPi), Complex(6.2831853071795862, 4.0));
  check_close(boundary_data_example1(Vec3(0.0, 0.0, 0.75), kPi), Complex(1.7048432366628263, 4.2190006808816616));
  check_close(boundary_data_example1(Vec3(0.6, 0.0, 0.8), kPi), Complex(-1.0, kPi));
  check_close(boundary_data_example1(Vec3(0.5, 0.0, 0.0), 1e-9), Complex(4.0, 0.0), 1e-9);

  // -d/dr of the monopole by central differences
  const Vec3 dir = Vec3(1.0, 2.0, -2.0) / 3.0;
  const double h = 1e-5;
  const Complex fd = -(monopole(dir * (1.0 + h), kPi) - monopole(dir * (1.0 - h), kPi)) / (2.0 * h);
  CHECK(std::abs(fd - boundary_data_example1(dir, kPi)) <= 1e-8);
  CHECK(std::abs(monopole_gradient(dir, kPi).cwiseProduct(dir.cast<Complex>()).sum() + boundary_data_example1(dir, kPi)) <= 1e-13);
}

TEST_CASE("example 2 boundary data") {
  check_close(boundary_data_example2(Vec3(0.1, 0.2, 0.0), Vec3(0, 0, 1), kPi), Complex(0.0, kPi));
  check_close(boundary_data_example2(Vec3(0.0, 0.0, 0.25), Vec3(0, 0, -1), kPi),
              Complex(2.2214414690791831, -2.2214414690791831));
  check_close(boundary_data_example2(Vec3(0.0, 0.0, -0.1), Vec3(0.8, 0, 0.6), kPi),
              Complex(0.58248331161763989, 1.7926992988449335));
  CHECK(std::abs(boundary_data_example2(Vec3(0.2, 0.1, 0.25), Vec3(0, 1, 0), kPi)) == 0.0);
}

TEST_CASE("preset validation") {
  CHECK_NOTHROW(example1_preset().validate());
  CHECK_NOTHROW(example2_preset().validate());
  CHECK_THROWS_AS(example1_preset(kPi, 1.0, 1.0).validate(), DomainError);
  CHECK_THROWS_AS(example1_preset(kPi, 1.0, 1.2).validate(), DomainError);
  CHECK_THROWS_AS(example1_preset(0.0).validate(), DomainError);
  CHECK_THROWS_AS(example1_preset(-1.0).validate(), DomainError);
  CHECK_THROWS_AS(example1_preset(kPi, 1.0, 0.4).validate(), DomainError);
  CHECK(example2_preset().inner_radius == doctest::Approx(std::sqrt(3.0) / 4.0));
  CHECK(fs::exists(default_u_channel_path()));
}

TEST_CASE("history CSV") {
  ConvergenceHistory h;
  std::ostringstream empty;
  CHECK_THROWS_WITH_AS(write_csv(h, empty), "nothing to export", IoError);
  CHECK_THROWS_WITH_AS(export_csv(h, fs::temp_directory_path() / "dtnfem_empty.csv"), "nothing to export", IoError);

  HistoryRow r;
  r.iteration = 0;
  r.dof = 1234;
  r.cells = 5000;
  r.truncation = 31;
  r.eps_N = 2.5e-9;
  r.eta = 0.75;
  r.wall_time = 1.5;
  h.append(r);
  std::ostringstream one;
  write_csv(h, one);
  CHECK(one.str() == "iter,dof,cells,N,eps_N,eta,e_h,wall_time_s\n0,1234,5000,31,2.5e-09,0.75,,1.5\n");

  r.iteration = 1;
  r.dof = 2000;
  r.e_h = 0.125;
  h.append(r);
  std::ostringstream two;
  write_csv(h, two);
  CHECK(two.str().find("\n1,2000,5000,31,2.5e-09,0.75,0.125,1.5\n") != std::string::npos);
}

TEST_CASE("VTK output") {
  AdaptConfig config;
  config.tolerance = 1e6;
  const auto result = run(example1_preset(), config);
  const auto path = fs::temp_directory_path() / "dtnfem_test.vtk";
  write_vtk(*result.mesh, result.dofs, result.solution, result.indicators.cell_eta, path);
  const auto lines = lines_of(path);
  fs::remove(path);
  const auto subtets = result.mesh->subtets().size();
  const auto find = [&](const std::string& prefix) {
    for (const auto& l : lines)
      if (l.rfind(prefix, 0) == 0) return l;
    return std::string();
  };
  CHECK(find("POINTS ") == "POINTS " + std::to_string(result.dofs.size()) + " double");
  CHECK(find("CELLS ") == "CELLS " + std::to_string(subtets) + " " + std::to_string(5 * subtets));
  CHECK(find("POINT_DATA ") == "POINT_DATA " + std::to_string(result.dofs.size()));
  CHECK(find("CELL_DATA ") == "CELL_DATA " + std::to_string(subtets));
  for (const char* name : {"SCALARS re_u", "SCALARS im_u", "SCALARS abs_u", "SCALARS eta"}) CHECK(!find(name).empty());

  CHECK_THROWS_AS(write_vtk(*result.mesh, result.dofs, ComplexVector::Zero(3), result.indicators.cell_eta, path), IoError);
}

TEST_CASE("command line rejects invalid parameters") {
  const auto out = (fs::temp_directory_path() / "dtnfem_cli_bad").string();
  CHECK(run_cli("--radius-R 1 --radius-Rprime 1 --out " + out) == 2);
  CHECK(run_cli("--kappa 0 --out " + out) == 2);
  CHECK(run_cli("--kappa -2 --out " + out) == 2);
  CHECK(run_cli("--theta 1 --out " + out) == 2);
  CHECK(run_cli("--theta 0 --out " + out) == 2);
  CHECK(run_cli("--tol 0 --out " + out) == 2);
  CHECK(run_cli("--example 3 --out " + out) != 0);
  fs::remove_all(out);
}

TEST_CASE("command line runs are reproducible") {
  const auto a = fs::temp_directory_path() / "dtnfem_cli_a";
  const auto b = fs::temp_directory_path() / "dtnfem_cli_b";
  const std::string args = "--example 1 --max-iter 3 --tol 1e-6 --out ";
  REQUIRE(run_cli(args + a.string()) == 0);
  REQUIRE(run_cli(args + b.string()) == 0);
  const auto la = lines_of(a / "history.csv"), lb = lines_of(b / "history.csv");
  REQUIRE(la.size() == 4);
  REQUIRE(la.size() == lb.size());
  CHECK(la[0] == kHistoryHeader);
  for (std::size_t i = 0; i < la.size(); ++i) CHECK(without_time(la[i]) == without_time(lb[i]));
  CHECK(lines_of(a / "solution.vtk") == lines_of(b / "solution.vtk"));
  fs::remove_all(a);
  fs::remove_all(b);
}
