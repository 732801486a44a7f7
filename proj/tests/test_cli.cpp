#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ifgf/geometry.hpp"

namespace {

const std::filesystem::path kOut = std::filesystem::temp_directory_path() / "ifgf_cli";

int run_cli(const std::string& args) {
  std::filesystem::create_directories(kOut);
  const std::string cmd = std::string(IFGF_CLI_PATH) + " " + args;
  return std::system(cmd.c_str());
}

nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("cli run emits a versioned report hitting the error target") {
  const auto out = kOut / "run.json";
  const int rc = run_cli("run --shape sphere --size-lambda 2 --n 2400 --seed 3 "
                         "--threads 1 --output " + out.string());
  REQUIRE(rc == 0);
  const auto j = read_json(out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["n"] == 2400);
  CHECK(j["epsilon"]["value"].get<double>() <= 5e-3);
  CHECK(j["config"]["kernel"] == "helmholtz");
  CHECK(j["stage_seconds"]["total"].get<double>() > 0.0);
  CHECK(j.contains("result_checksum"));
}

TEST_CASE("cli run: rank counts do not change the result checksum") {
  const auto out1 = kOut / "r1.json";
  const auto out4 = kOut / "r4.json";
  REQUIRE(run_cli("run --shape sphere --size-lambda 2 --n 1536 --seed 5 --threads 1 "
                  "--ranks 1 --output " + out1.string()) == 0);
  REQUIRE(run_cli("run --shape sphere --size-lambda 2 --n 1536 --seed 5 --threads 1 "
                  "--ranks 4 --output " + out4.string()) == 0);
  const auto j1 = read_json(out1);
  const auto j4 = read_json(out4);
  CHECK(j1["result_checksum"] == j4["result_checksum"]);
  CHECK(j4.contains("comm"));
  CHECK(j4["comm"]["total_fetched"].get<std::uint64_t>() > 0);
}

TEST_CASE("cli run: laplace output has no imaginary part") {
  const auto out = kOut / "lap.json";
  REQUIRE(run_cli("run --shape sphere --kernel laplace --n 1536 --seed 7 --threads 1 "
                  "--output " + out.string()) == 0);
  const auto ref = kOut / "lap_ref.json";
  REQUIRE(run_cli("run --shape sphere --kernel laplace --n 1536 --seed 7 --threads 1 "
                  "--output " + ref.string()) == 0);
  const auto j = read_json(out);
  CHECK(j["result_checksum"] == read_json(ref)["result_checksum"]);  // seeded
  CHECK(j["config"]["wavenumber"].get<double>() == 0.0);
  CHECK(j["imag_max_abs"].get<double>() == 0.0);  // real kernel, real data
}

TEST_CASE("cli verify passes in full mode on a small case") {
  CHECK(run_cli("verify --shape sphere --size-lambda 2 --n 2400 --verify full "
                "--threads 1 --seed 11 > " + (kOut / "verify.txt").string()) == 0);
}

TEST_CASE("cli verify samples per rank in subsample mode") {
  CHECK(run_cli("verify --shape sphere --size-lambda 2 --n 2400 --verify subsample "
                "--ranks 2 --m 200 --threads 1 --seed 11 > /dev/null") == 0);
}

TEST_CASE("cli verify fails when the threshold is impossible") {
  CHECK(run_cli("verify --shape sphere --size-lambda 2 --n 2400 --verify full "
                "--threads 1 --seed 11 --threshold 1e-12 > /dev/null") != 0);
}

TEST_CASE("cli scale emits one CSV row per requested size") {
  const auto out = kOut / "scale.csv";
  REQUIRE(run_cli("scale --shape sphere --size-lambda 2 --ns 1536 --threads 1 "
                  "--seed 13 --output " + out.string()) == 0);
  std::ifstream in(out);
  std::string header, row, extra;
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, row));
  CHECK(!std::getline(in, extra));
  CHECK(header.find("t_per_nlog2n") != std::string::npos);
  CHECK(row.find("1536,") == 0);
}

TEST_CASE("cli ingests a binary point file") {
  const auto pts = kOut / "cloud.bin";
  std::filesystem::create_directories(kOut);
  ifgf::write_points_binary(pts, ifgf::generate_surface(ifgf::Shape::Sphere, 1.0, 16, 5));
  const auto out = kOut / "ingest.json";
  REQUIRE(run_cli("run --input " + pts.string() +
                  " --size-lambda 2 --threads 1 --output " + out.string()) == 0);
  const auto j = read_json(out);
  CHECK(j["n"] == 6 * 16 * 16);
  CHECK(j["epsilon"]["value"].get<double>() <= 5e-3);
}
