#include <doctest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "idim/imbalance.hpp"
#include "idim/io.hpp"
#include "idim/report.hpp"
#include "idim/rng.hpp"
#include "idim/synth.hpp"

using namespace idim;
namespace fs = std::filesystem;

namespace {

std::string cli_binary() {
  const char* env = std::getenv("IDIM_CLI");
  return env ? env : "";
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("idim_cli_test_" + std::to_string(Rng(std::random_device{}()).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string command = cli_binary() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

LabeledDataset two_class_dataset(std::uint64_t seed) {
  synth::GaussianSpec spec{3, 3, 80, synth::Identity{}, false, seed};
  LabeledDataset out;
  out.data = synth::sample_gaussian(spec);
  out.labels.assign(80, 0);
  for (std::size_t i = 40; i < 80; ++i) out.labels[i] = 1;
  return out;
}

}  // namespace

TEST_CASE("classwise command writes a replayable report") {
  REQUIRE_FALSE(cli_binary().empty());
  TempDir dir;
  const auto dataset = two_class_dataset(101);
  io::write_csv(dir.file("toy.csv"), dataset.data, &dataset.labels);

  const int rc = run("classwise --input " + dir.file("toy.csv") +
                     " --format csv --estimator fishers --out " + dir.file("r.json"));
  REQUIRE(rc == 0);

  const auto report = io::read_report(dir.file("r.json"));
  REQUIRE(report.classes.size() == 2);
  CHECK(report.classes[0].count == 40);
  CHECK(report.classes[1].count == 40);
  CHECK(report.classes[0].id_raw > 0.0);
  CHECK(report.estimator.kind == EstimatorKind::FisherS);
}

TEST_CASE("weights command reproduces the loss substitution from a stored report") {
  REQUIRE_FALSE(cli_binary().empty());
  TempDir dir;

  ClassIdProfile profile;
  profile.raw = {0.2, 0.3, 0.5};
  profile.counts = {30, 20, 10};
  profile.degenerate = {false, false, false};
  profile.normalize();
  io::write_report(dir.file("r.json"),
                   io::ReportJson::from_profile(profile, EstimatorSelector{}, 0, {0, 1, 2}));

  const int rc = run("weights --report " + dir.file("r.json") + " --weights-kind loss --out " +
                     dir.file("w.json"));
  REQUIRE(rc == 0);

  const auto out = io::read_report(dir.file("w.json"));
  REQUIRE(out.artifacts.size() == 1);
  CHECK(out.artifacts[0].kind == MitigationKind::LossWeights);
  REQUIRE(out.artifacts[0].values.size() == 3);
  CHECK(out.artifacts[0].values[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out.artifacts[0].values[1] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(out.artifacts[0].values[2] == doctest::Approx(1.5).epsilon(1e-12));

  // replay: derive a second artifact from the written report without re-estimating
  const int rc2 = run("weights --report " + dir.file("w.json") + " --weights-kind ldam --out " +
                      dir.file("w2.json"));
  REQUIRE(rc2 == 0);
  const auto out2 = io::read_report(dir.file("w2.json"));
  CHECK(out2.artifacts.size() == 2);

  // progressive blend midpoint between instance-balanced and ID probabilities
  const int rc3 = run("weights --report " + dir.file("r.json") +
                      " --weights-kind sampling --blend 50/100 --out " + dir.file("b.json"));
  REQUIRE(rc3 == 0);
  const auto blended = io::read_report(dir.file("b.json"));
  REQUIRE(blended.artifacts.size() == 1);
  const auto instance = instance_balanced_probs(profile.counts);
  for (std::size_t c = 0; c < 3; ++c) {
    const double expected = 0.5 * instance[c] + 0.5 * profile.normalized[c];
    CHECK(blended.artifacts[0].values[c] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("weights command applies profile transforms") {
  REQUIRE_FALSE(cli_binary().empty());
  TempDir dir;
  ClassIdProfile profile;
  profile.raw = {1.0, 4.0};
  profile.counts = {10, 10};
  profile.degenerate = {false, false};
  profile.normalize();
  io::write_report(dir.file("r.json"),
                   io::ReportJson::from_profile(profile, EstimatorSelector{}, 0, {0, 1}));

  const int rc = run("weights --report " + dir.file("r.json") +
                     " --weights-kind sampling --transform reversed --out " + dir.file("rev.json"));
  REQUIRE(rc == 0);
  const auto out = io::read_report(dir.file("rev.json"));
  REQUIRE(out.artifacts.size() == 1);
  CHECK(out.artifacts[0].values[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(out.artifacts[0].values[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(out.artifacts[0].provenance.find("reversed") != std::string::npos);
}

TEST_CASE("synth and estimate commands round trip through idm1") {
  REQUIRE_FALSE(cli_binary().empty());
  TempDir dir;
  const int rc = run("synth --kind gaussian --d 3 --D 10 --n 500 --rotate --seed 5 --out " +
                     dir.file("cloud.idm1"));
  REQUIRE(rc == 0);

  const int rc2 = run("estimate --input " + dir.file("cloud.idm1") +
                      " --format idm1 --estimator fishers --out " + dir.file("est.json"));
  REQUIRE(rc2 == 0);
  const std::string text = slurp(dir.file("est.json"));
  CHECK(text.find("\"value\"") != std::string::npos);
  CHECK(text.find("\"retained_k\": 3") != std::string::npos);
}

TEST_CASE("synth longtail and noise commands transform labeled datasets") {
  REQUIRE_FALSE(cli_binary().empty());
  TempDir dir;
  const auto dataset = two_class_dataset(103);
  io::write_csv(dir.file("full.csv"), dataset.data, &dataset.labels);

  const int rc = run("synth --kind longtail --input " + dir.file("full.csv") +
                     " --format csv --n-max 40 --rho 4 --seed 2 --out " + dir.file("lt.csv") +
                     " --out-format csv");
  REQUIRE(rc == 0);
  const auto tail = io::read_csv_labeled(dir.file("lt.csv"), false);
  CHECK(tail.class_counts() == std::vector<std::int64_t>{40, 10});

  const int rc2 = run("synth --kind noise --input " + dir.file("lt.csv") +
                      " --format csv --labeled --sigma 0 --clip-lo -1e9 --clip-hi 1e9 --seed 2 --out " +
                      dir.file("noisy.csv") + " --out-format csv");
  REQUIRE(rc2 == 0);
  const auto noisy = io::read_csv_labeled(dir.file("noisy.csv"), false);
  CHECK(noisy.data == tail.data);  // sigma 0 with wide clip is the identity
  CHECK(noisy.labels == tail.labels);
}

TEST_CASE("bench runs are byte-identical for identical flags") {
  REQUIRE_FALSE(cli_binary().empty());
  TempDir dir;
  const std::string flags = "bench --suite extrinsic --seed 7 --out ";
  REQUIRE(run(flags + dir.file("a.csv")) == 0);
  REQUIRE(run(flags + dir.file("b.csv")) == 0);
  const std::string a = slurp(dir.file("a.csv"));
  CHECK(a == slurp(dir.file("b.csv")));
  CHECK(a.rfind("sweep_param,true_id,estimate,estimator,seed,n,D\n", 0) == 0);
  // one row per sweep point, no gaps
  CHECK(std::count(a.begin(), a.end(), '\n') == 4);
}

TEST_CASE("cli exit codes distinguish usage and data errors") {
  REQUIRE_FALSE(cli_binary().empty());
  TempDir dir;
  CHECK(run("classwise --format csv --out " + dir.file("x.json")) == 2);  // missing --input
  CHECK(run("bench --suite nope --out " + dir.file("x.csv")) == 2);       // invalid choice
  CHECK(run("classwise --input " + dir.file("absent.csv") + " --format csv --out " +
            dir.file("x.json")) == 1);  // data error
}
