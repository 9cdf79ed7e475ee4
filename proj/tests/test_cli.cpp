#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "clews/manifest.hpp"
#include "clews/storage.hpp"
#include "support/testutil.hpp"

namespace {

const char* cli_path() { return CLEWS_CLI_PATH; }

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

// Runs the binary inside `dir`, capturing stdout.
RunResult run_cli(const std::filesystem::path& dir, const std::string& args) {
  const auto out_file = dir / "_stdout.txt";
  const std::string command = "cd '" + dir.string() + "' && '" + std::string(cli_path()) +
                              "' " + args + " > '" + out_file.string() + "' 2> _stderr.txt";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.stdout_text = buffer.str();
  return result;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("reduce prints the greedy example to four decimals") {
  testutil::TempDir tmp("cli");
  std::ofstream(tmp.file("m.csv")) << "1,5,3\n2,0.5,4\n6,7,2\n";
  const auto result = run_cli(tmp.path(), "reduce --matrix m.csv --kind bpwr --r 3");
  CHECK(result.exit_code == 0);
  CHECK(result.stdout_text == "1.1667\n");

  // Masked cells via the M marker.
  std::ofstream(tmp.file("masked.csv")) << "2,1\nM,1\n";
  const auto masked = run_cli(tmp.path(), "reduce --matrix masked.csv --kind mean");
  CHECK(masked.exit_code == 0);
  CHECK(masked.stdout_text == "1.3333\n");
}

TEST_CASE("usage errors exit with code 2") {
  testutil::TempDir tmp("cli");
  CHECK(run_cli(tmp.path(), "no-such-command").exit_code == 2);
  CHECK(run_cli(tmp.path(), "generate --shared 1.5").exit_code == 2);
  CHECK(run_cli(tmp.path(), "reduce --matrix missing.csv").exit_code == 2);
  std::ofstream(tmp.file("m.csv")) << "1,2\n3,4\n";
  CHECK(run_cli(tmp.path(), "reduce --matrix m.csv --kind best").exit_code == 2);
  CHECK(run_cli(tmp.path(), "reduce --matrix m.csv --kind bpwr --r 5").exit_code == 2);
}

TEST_CASE("generate is bit-deterministic and loadable") {
  testutil::TempDir tmp("cli");
  const std::string flags =
      "generate --cliques 3 --tracks 2 --segments 4 --dim 8 --shared 0.5 --noise 0.1 "
      "--seed 7 --out ";
  CHECK(run_cli(tmp.path(), flags + "a").exit_code == 0);
  CHECK(run_cli(tmp.path(), flags + "b").exit_code == 0);
  CHECK(read_file(tmp.file("a.clws")) == read_file(tmp.file("b.clws")));
  CHECK(read_file(tmp.file("a.tsv")) == read_file(tmp.file("b.tsv")));

  // Manifests carry matching artifact hashes for the identical outputs.
  const auto manifest_a = read_file(tmp.file("a.manifest.json"));
  CHECK(manifest_a.find("fnv1a64:") != std::string::npos);
  CHECK(manifest_a.find("\"seed\": 7") != std::string::npos);

  // A minimal corpus loads and validates.
  CHECK(run_cli(tmp.path(), "generate --cliques 1 --tracks 2 --segments 2 --dim 4 --seed 1 "
                            "--out tiny")
            .exit_code == 0);
  const auto tiny = clews::load_store(tmp.file("tiny.clws"));
  tiny.validate();
  CHECK(tiny.tracks.size() == 2);

  // With a single clique there are no non-matches, so NAR is undefined for
  // every query and evaluation is a runtime failure (exit 1).
  CHECK(run_cli(tmp.path(),
                "evaluate --queries tiny.clws --protocol track --reduction min "
                "--segment-len 1 --hop 1 --out tiny_eval")
            .exit_code == 1);
}

TEST_CASE("evaluate validates the protocol/reduction pairing") {
  testutil::TempDir tmp("cli");
  REQUIRE(run_cli(tmp.path(),
                  "generate --cliques 3 --tracks 2 --segments 4 --dim 8 --seed 1 --out c")
              .exit_code == 0);
  CHECK(run_cli(tmp.path(),
                "evaluate --queries c.clws --protocol segment --reduction bpwr-3 --taus 1 "
                "--segment-len 2 --hop 1 --out x")
            .exit_code == 2);
  CHECK(run_cli(tmp.path(),
                "evaluate --queries c.clws --protocol segment --reduction min --taus 1,2 "
                "--segment-len 2 --hop 1 --out seg")
            .exit_code == 0);

  // Two rows per metric for a two-point tau grid.
  const auto csv = read_file(tmp.file("seg.csv"));
  CHECK(csv.find("segment,1,nar,") != std::string::npos);
  CHECK(csv.find("segment,1,map,") != std::string::npos);
  CHECK(csv.find("segment,2,nar,") != std::string::npos);
  CHECK(csv.find("segment,2,map,") != std::string::npos);
}

TEST_CASE("random protocol runs are byte-identical for a fixed seed") {
  testutil::TempDir tmp("cli");
  REQUIRE(run_cli(tmp.path(),
                  "generate --cliques 3 --tracks 2 --segments 6 --dim 8 --seed 2 --out c")
              .exit_code == 0);
  const std::string eval_flags =
      "evaluate --queries c.clws --protocol random --taus 2,3 --segment-len 3 --hop 1 "
      "--seed 11 --out ";
  CHECK(run_cli(tmp.path(), eval_flags + "r1").exit_code == 0);
  CHECK(run_cli(tmp.path(), eval_flags + "r2").exit_code == 0);
  CHECK(read_file(tmp.file("r1.csv")) == read_file(tmp.file("r2.csv")));
  CHECK(read_file(tmp.file("r1.json")) == read_file(tmp.file("r2.json")));
}

TEST_CASE("loss-eval reports values and gradients from a batch file") {
  testutil::TempDir tmp("cli");
  std::ofstream(tmp.file("batch.json")) << R"({
    "distances": [[0.5], [1.0]],
    "assignment": [[1], [0]],
    "gamma": 5.0,
    "epsilon": 1e-6,
    "loss": "clews"
  })";
  const auto result = run_cli(tmp.path(), "loss-eval --batch batch.json --out loss");
  CHECK(result.exit_code == 0);
  const auto json = read_file(tmp.file("loss.json"));
  CHECK(json.find("\"value\"") != std::string::npos);
  // Single positive at 0.5: grad = 2 * 0.5 / 1 = 1.
  CHECK(json.find("\"g\": 1.0") != std::string::npos);

  const auto stable = run_cli(tmp.path(), "loss-eval --batch batch.json --loss clews-stable "
                                          "--out stable");
  CHECK(stable.exit_code == 0);

  std::ofstream(tmp.file("bad.json")) << "{ not json";
  CHECK(run_cli(tmp.path(), "loss-eval --batch bad.json --out x").exit_code == 2);
}

TEST_CASE("grad-curve writes the curve CSV with the d=0 endpoint") {
  testutil::TempDir tmp("cli");
  const auto result = run_cli(
      tmp.path(), "grad-curve --gamma 5 --epsilon 1e-6 --set-size 128 --points 64 --out gc");
  CHECK(result.exit_code == 0);
  const auto csv = read_file(tmp.file("gc.csv"));
  CHECK(csv.rfind("potential,grad,distance\n", 0) == 0);
  CHECK(csv.find("\n1,0,0\n") != std::string::npos);
}

TEST_CASE("train-toy emits a trace and a loadable optimized store") {
  testutil::TempDir tmp("cli");
  REQUIRE(run_cli(tmp.path(),
                  "generate --cliques 2 --tracks 2 --segments 2 --dim 4 --seed 3 --out c")
              .exit_code == 0);
  const std::string train_flags =
      "train-toy --store c.clws --cliques c.tsv --anchors 4 --positives 1 --segments 2 "
      "--pos-reduction bpwr-2 --neg-reduction min --steps 40 --step-size 0.05 --seed 5 "
      "--out ";
  CHECK(run_cli(tmp.path(), train_flags + "t1").exit_code == 0);
  CHECK(run_cli(tmp.path(), train_flags + "t2").exit_code == 0);
  CHECK(read_file(tmp.file("t1.clws")) == read_file(tmp.file("t2.clws")));
  CHECK(read_file(tmp.file("t1.trace.csv")) == read_file(tmp.file("t2.trace.csv")));

  const auto trace = read_file(tmp.file("t1.trace.csv"));
  CHECK(trace.rfind("step,loss\n", 0) == 0);
  // 40 steps + header.
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 41);
}

TEST_CASE("sweep writes one row per grid point") {
  testutil::TempDir tmp("cli");
  REQUIRE(run_cli(tmp.path(),
                  "generate --cliques 2 --tracks 2 --segments 2 --dim 4 --seed 3 --out c")
              .exit_code == 0);
  const auto result = run_cli(
      tmp.path(),
      "sweep --store c.clws --pos-reductions bpwr-2 --neg-reductions min,meanmin "
      "--gammas 5 --epsilons 1e-6 --anchors 4 --positives 1 --segments 2 --steps 30 "
      "--step-size 0.05 --seed 5 --eval-segment-len 1 --eval-hop 1 --out sw");
  CHECK(result.exit_code == 0);
  const auto csv = read_file(tmp.file("sw.csv"));
  CHECK(csv.rfind("pos_reduction,neg_reduction,gamma,epsilon,nar,map\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
}
