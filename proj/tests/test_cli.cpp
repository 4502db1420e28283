// End-to-end smoke tests: every CLI subcommand over a small synthetic
// dataset, driving the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "support/references.hpp"

namespace {

const std::string kCli = ASTGCN_CLI_PATH;

int run(const std::string& args, const std::string& capture = "") {
  std::string command = kCli + " " + args;
  if (!capture.empty()) {
    command += " >" + capture + " 2>&1";
  } else {
    command += " >/dev/null 2>&1";
  }
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Workspace {
  refs::TempDir dir{"astgcn-cli"};
  std::string data;
  std::string run_dir;

  Workspace() : data(dir.str("data")), run_dir(dir.str("run")) {}

  std::string data_flags() const {
    return " --adjacency " + data + "/adjacency.csv --speeds " + data +
           "/speeds.csv --poi " + data + "/poi.csv --weather " + data +
           "/weather.csv";
  }
  std::string quick_train_flags() const {
    return " --seed 5 --epochs 5 --hidden-units 8 --batch-size 32"
           " --learning-rate 0.01 --horizon 4";
  }
};

}  // namespace

TEST_CASE("cli smoke: every subcommand round-trips on synthetic data") {
  Workspace ws;

  CHECK(run("synth --out-dir " + ws.data +
            " --nodes 8 --steps 260 --seed 5") == 0);
  CHECK(std::filesystem::exists(ws.data + "/adjacency.csv"));
  CHECK(std::filesystem::exists(ws.data + "/speeds.csv"));
  CHECK(std::filesystem::exists(ws.data + "/poi.csv"));
  CHECK(std::filesystem::exists(ws.data + "/weather.csv"));

  const std::string train_log = ws.dir.str("train.log");
  CHECK(run("train" + ws.data_flags() + ws.quick_train_flags() +
                " --out-dir " + ws.run_dir,
            train_log) == 0);
  CHECK(std::filesystem::exists(ws.run_dir + "/checkpoint.json"));
  CHECK(std::filesystem::exists(ws.run_dir + "/loss_history.csv"));
  CHECK(refs::slurp(train_log).find("final epoch loss") != std::string::npos);

  CHECK(run("eval --checkpoint " + ws.run_dir + "/checkpoint.json" +
            ws.data_flags() + " --out-dir " + ws.run_dir +
            " --horizons 15,30,45,60 --plot-node 2") == 0);
  const std::string report = refs::slurp(ws.run_dir + "/report.csv");
  CHECK(refs::count_occurrences(report, "\n") == 5);  // header + 4 horizons
  CHECK(report.find("weather+poi,15,") != std::string::npos);
  CHECK(report.find("weather+poi,60,") != std::string::npos);

  const std::string chart = refs::slurp(ws.run_dir + "/chart.svg");
  CHECK(refs::xml_well_formed(chart));
  CHECK(refs::count_occurrences(chart, "<polyline") == 2);

  CHECK(run("ablate" + ws.data_flags() + ws.quick_train_flags() +
            " --out-dir " + ws.run_dir + " --epochs 3 --horizons 15") == 0);
  const std::string ablation = refs::slurp(ws.run_dir + "/ablation_report.csv");
  for (const char* label : {"tgcn,", "poi,", "weather,", "weather+poi,"}) {
    CHECK(ablation.find(label) != std::string::npos);
  }

  CHECK(run("perturb --checkpoint " + ws.run_dir + "/checkpoint.json" +
            ws.data_flags() + " --out-dir " + ws.run_dir +
            " --sigmas 0.2,0.4 --lambdas 1,2") == 0);
  const std::string perturbation =
      refs::slurp(ws.run_dir + "/perturbation_report.csv");
  CHECK(perturbation.find("clean,") != std::string::npos);
  CHECK(perturbation.find("gaussian(0.2),") != std::string::npos);
  CHECK(perturbation.find("gaussian(0.4),") != std::string::npos);
  CHECK(perturbation.find("poisson(1),") != std::string::npos);
  CHECK(perturbation.find("poisson(2),") != std::string::npos);

  CHECK(run("sweep" + ws.data_flags() + ws.quick_train_flags() +
            " --out-dir " + ws.run_dir +
            " --grid epochs --values 2,4") == 0);
  const std::string sweep = refs::slurp(ws.run_dir + "/sweep_epochs.csv");
  CHECK(sweep.find("epochs=2,") != std::string::npos);
  CHECK(sweep.find("epochs=4,") != std::string::npos);
}

TEST_CASE("cli failure modes") {
  Workspace ws;

  // no subcommand
  CHECK(run("") != 0);

  // missing adjacency file: exit code 2, message names the path
  const std::string log = ws.dir.str("err.log");
  const int code = run("train --adjacency " + ws.dir.str("nope.csv") +
                           " --speeds " + ws.dir.str("nope2.csv") +
                           " --out-dir " + ws.run_dir,
                       log);
  CHECK(code == 2);
  CHECK(refs::slurp(log).find("nope.csv") != std::string::npos);

  // unknown flag value type
  CHECK(run("train --epochs notanumber --adjacency x --speeds y") != 0);
}

TEST_CASE("cli reruns reproduce the checkpoint byte for byte") {
  Workspace ws;
  REQUIRE(run("synth --out-dir " + ws.data +
              " --nodes 8 --steps 260 --seed 5") == 0);
  const std::string run1 = ws.dir.str("r1");
  const std::string run2 = ws.dir.str("r2");
  REQUIRE(run("train" + ws.data_flags() + ws.quick_train_flags() +
              " --out-dir " + run1) == 0);
  REQUIRE(run("train" + ws.data_flags() + ws.quick_train_flags() +
              " --out-dir " + run2) == 0);
  CHECK(refs::slurp(run1 + "/checkpoint.json") ==
        refs::slurp(run2 + "/checkpoint.json"));
  CHECK(refs::slurp(run1 + "/loss_history.csv") ==
        refs::slurp(run2 + "/loss_history.csv"));
}

TEST_CASE("chart points mirror the prediction dump") {
  Workspace ws;
  REQUIRE(run("synth --out-dir " + ws.data +
              " --nodes 8 --steps 260 --seed 5") == 0);
  REQUIRE(run("train" + ws.data_flags() + ws.quick_train_flags() +
              " --out-dir " + ws.run_dir) == 0);
  REQUIRE(run("eval --checkpoint " + ws.run_dir + "/checkpoint.json" +
              ws.data_flags() + " --out-dir " + ws.run_dir +
              " --plot-node 0 --plot-steps 24") == 0);

  // 24 charted steps for node 0 -> both polylines carry 24 points
  const std::string chart = refs::slurp(ws.run_dir + "/chart.svg");
  std::size_t pos = 0;
  for (int series = 0; series < 2; ++series) {
    pos = chart.find("points=\"", pos);
    REQUIRE(pos != std::string::npos);
    const std::size_t end = chart.find('"', pos + 8);
    const std::string points = chart.substr(pos + 8, end - pos - 8);
    CHECK(refs::count_occurrences(points, ",") == 24);
    pos = end;
  }
}
