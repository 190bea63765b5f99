#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "evsched/community.hpp"
#include "evsched/csv_io.hpp"
#include "evsched/errors.hpp"

using namespace evsched;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("evsched_csv_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

CommunityScenario sample_scenario() {
  SynthesisParams params;
  params.n_households = 6;
  params.evs_per_household_mean = 1.2;
  params.observed_days = 4;
  params.seed = 31;
  return synthesize_community(params);
}

void patch_line(const fs::path& file, size_t line_no, const std::string& replacement) {
  std::ifstream in(file);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  lines.at(line_no - 1) = replacement;
  std::ofstream out(file, std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace

TEST_SUITE("csv_io") {
  TEST_CASE("save and load round-trips exactly") {
    TempDir dir;
    const auto original = sample_scenario();
    const std::string path = (dir.path / "community.csv").string();
    save_community_csv(original, path);
    const auto loaded = load_community_csv(path);
    CHECK(loaded == original);
  }

  TEST_CASE("subset scenarios with gaps in the id space round-trip") {
    TempDir dir;
    auto sc = sample_scenario();
    sc.households.erase(sc.households.begin() + 2);  // ids now 0,1,3,4,5
    const std::string path = (dir.path / "subset.csv").string();
    save_community_csv(sc, path);
    CHECK(load_community_csv(path) == sc);
  }

  TEST_CASE("negative power names the offending line") {
    TempDir dir;
    const auto sc = sample_scenario();
    const std::string path = (dir.path / "community.csv").string();
    save_community_csv(sc, path);
    patch_line(path, 3, "residential,0,,,1,-1.0");
    try {
      load_community_csv(path);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find(":3:") != std::string::npos);
      CHECK(msg.find("negative") != std::string::npos);
    }
  }

  TEST_CASE("ragged rows are rejected with their line number") {
    TempDir dir;
    const auto sc = sample_scenario();
    const std::string path = (dir.path / "community.csv").string();
    save_community_csv(sc, path);
    patch_line(path, 5, "residential,0,4");
    try {
      load_community_csv(path);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":5:") != std::string::npos);
    }
  }

  TEST_CASE("malformed header is rejected") {
    TempDir dir;
    const auto sc = sample_scenario();
    const std::string path = (dir.path / "community.csv").string();
    save_community_csv(sc, path);
    patch_line(path, 1, "kind,owner,ev,day,slot,kw");
    CHECK_THROWS_AS(load_community_csv(path), ParseError);
  }

  TEST_CASE("slot outside the grid is a dimension error") {
    TempDir dir;
    const auto sc = sample_scenario();
    const std::string path = (dir.path / "community.csv").string();
    save_community_csv(sc, path);
    patch_line(path, 4, "residential,0,,,144,1.0");
    try {
      load_community_csv(path);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("slot 144") != std::string::npos);
      CHECK(msg.find("144 slots") != std::string::npos);
    }
  }

  TEST_CASE("a household with missing residential slots is a dimension error") {
    TempDir dir;
    const auto sc = sample_scenario();
    const std::string path = (dir.path / "community.csv").string();
    save_community_csv(sc, path);
    patch_line(path, 2, "");  // drop one residential row
    try {
      load_community_csv(path);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("missing residential rows") != std::string::npos);
    }
  }

  TEST_CASE("missing sidecar is an io error") {
    TempDir dir;
    const auto sc = sample_scenario();
    const std::string path = (dir.path / "community.csv").string();
    save_community_csv(sc, path);
    fs::remove(sidecar_path(path));
    CHECK_THROWS_AS(load_community_csv(path), IoError);
  }
}
