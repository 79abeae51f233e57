#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "io.hpp"
#include "kldproj/gaussian.hpp"
#include "kldproj_cli/app.hpp"

using namespace kldproj;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run kld_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kldproj");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kldproj-unit-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli: exit codes by error kind") {
  const fs::path dir = scratch("codes");
  CHECK(kld_cli({"gen", "--d", "3"}).code == cli::kValidation);
  CHECK(kld_cli({"nonsense"}).code == cli::kValidation);
  CHECK(kld_cli({"gen", "--seed", "1", "--d", "3", "--classes", "1", "--out", dir.string()}).code ==
        cli::kValidation);

  const Run missing = kld_cli({"fit", "--params", (dir / "a.json").string(), "--params",
                               (dir / "b.json").string(), "--r", "1", "--out",
                               (dir / "f.json").string()});
  CHECK(missing.code == cli::kIo);
  const auto err = nlohmann::json::parse(missing.err);
  CHECK(err["error"]["kind"] == "io");

  // Singular covariance in a parameter file: numerical failure.
  REQUIRE(kld_cli({"gen", "--seed", "1", "--d", "2", "--out", dir.string()}).code == cli::kOk);
  cli::write_json(dir / "bad.json",
                  {{"mean", {0.0, 0.0}}, {"covariance", {{1.0, 1.0}, {1.0, 1.0}}}});
  const Run singular = kld_cli({"fit", "--params", (dir / "class1.json").string(), "--params",
                                (dir / "bad.json").string(), "--r", "1", "--method", "alg1",
                                "--out", (dir / "f.json").string()});
  CHECK(singular.code == cli::kNumerical);
  CHECK_FALSE(fs::exists(dir / "f.json"));
}

TEST_CASE("cli: fit output agrees with the library") {
  const fs::path dir = scratch("fit");
  REQUIRE(kld_cli({"gen", "--seed", "4", "--d", "5", "--out", dir.string()}).code == cli::kOk);
  const GaussianParams p1 = cli::read_params(dir / "class1.json");
  const GaussianParams p2 = cli::read_params(dir / "class2.json");
  REQUIRE(kld_cli({"fit", "--params", (dir / "class1.json").string(), "--params",
                   (dir / "class2.json").string(), "--r", "2", "--method", "alg2", "--out",
                   (dir / "f.json").string()})
              .code == cli::kOk);
  const auto doc = cli::read_json(dir / "f.json");
  const ProjectionResult p = cli::projection_from_json(doc);
  CHECK(doc["full_kld"].get<double>() == doctest::Approx(kld(p1, p2)).epsilon(1e-12));
  CHECK(kld_projected(p.original_matrix, p1, p2) ==
        doctest::Approx(doc["achieved_kld"].get<double>()).epsilon(1e-9));
  CHECK(doc["config"]["method"] == "alg2");
}

TEST_CASE("cli: CSV round trip keeps every bit") {
  const fs::path dir = scratch("csv");
  REQUIRE(kld_cli({"gen", "--seed", "9", "--d", "3", "--n", "20", "--out", dir.string()}).code ==
          cli::kOk);
  const LabeledDataset a = cli::read_dataset(dir / "data.csv");
  cli::write_atomic(dir / "copy.csv", cli::dataset_csv(a));
  const LabeledDataset b = cli::read_dataset(dir / "copy.csv");
  CHECK(a.samples == b.samples);
  CHECK(a.labels == b.labels);
  CHECK(a.size() == 40);
}
