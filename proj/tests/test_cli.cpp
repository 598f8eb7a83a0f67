#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ganforge/checkpoint.hpp"
#include "ganforge/image_io.hpp"
#include "ganforge/rng.hpp"

using namespace ganforge;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("ganforge_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = std::string(GANFORGE_CLI_PATH) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_toy_dataset(const fs::path& dir, int count, int side, uint64_t seed) {
  fs::create_directories(dir);
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    Image img;
    img.width = side;
    img.height = side;
    img.pixels.resize(3u * static_cast<size_t>(side) * side);
    for (auto& p : img.pixels) p = static_cast<uint8_t>(rng.below(256));
    char name[32];
    std::snprintf(name, sizeof name, "img_%03d.ppm", i);
    write_ppm((dir / name).string(), img);
  }
}

std::string toy_config(const fs::path& root, long total_steps) {
  std::ostringstream ss;
  ss << "[run]\n"
     << "seed = 5\n"
     << "checkpoint_dir = " << (root / "ckpt").string() << "\n"
     << "checkpoint_interval = 20\n"
     << "[model]\n"
     << "resolution = 8\n"
     << "width_multiplier = 0.03125\n"
     << "[data]\n"
     << "dir = " << (root / "imgs").string() << "\n"
     << "batch_override = 4\n"
     << "[latent]\n"
     << "dim = 12\n"
     << "[train]\n"
     << "total_steps = " << total_steps << "\n"
     << "alt_interval = 10\n";
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

size_t count_lines(const std::string& text) {
  size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("cli requires a subcommand and rejects unknown flags") {
  fs::path dir = fresh_dir("usage");
  CHECK(run_cli("", dir).exit_code == 1);
  CHECK(run_cli("train", dir).exit_code == 1);  // --config is required
  CHECK(run_cli("frobnicate", dir).exit_code == 1);
  fs::remove_all(dir);
}

TEST_CASE("train writes the loss log and periodic checkpoints") {
  fs::path dir = fresh_dir("train");
  write_toy_dataset(dir / "imgs", 16, 8, 901);
  write_text(dir / "run.cfg", toy_config(dir, 40));
  RunResult r = run_cli("train --config " + (dir / "run.cfg").string(), dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("dataset: 16 images") != std::string::npos);
  CHECK(r.out.find("finished at step 40") != std::string::npos);
  CHECK(fs::exists(dir / "ckpt" / "ckpt_step20.gfc"));
  CHECK(fs::exists(dir / "ckpt" / "ckpt_step40.gfc"));

  const std::string csv = slurp(dir / "ckpt" / "loss.csv");
  REQUIRE(count_lines(csv) == 41);
  CHECK(csv.rfind("step,d_loss,g_loss,extra_target,guard_status\n", 0) == 0);
  CHECK(csv.find("\n10,") != std::string::npos);
  // Extras land on multiples of alt_interval = 10, alternating G first.
  CHECK(csv.find(",G,ok") != std::string::npos);
  CHECK(csv.find(",D,ok") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("train is deterministic and resume reproduces the uninterrupted log") {
  fs::path a = fresh_dir("train_a");
  fs::path b = fresh_dir("train_b");
  write_toy_dataset(a / "imgs", 16, 8, 901);
  write_toy_dataset(b / "imgs", 16, 8, 901);

  write_text(a / "run.cfg", toy_config(a, 40));
  REQUIRE(run_cli("train --config " + (a / "run.cfg").string(), a).exit_code == 0);

  // Same run split at step 20 across two invocations.
  write_text(b / "short.cfg", toy_config(b, 20));
  write_text(b / "full.cfg", toy_config(b, 40));
  REQUIRE(run_cli("train --config " + (b / "short.cfg").string(), b).exit_code == 0);
  RunResult resumed = run_cli("train --config " + (b / "full.cfg").string() + " --resume " +
                                  (b / "ckpt" / "ckpt_step20.gfc").string(),
                              b);
  REQUIRE(resumed.exit_code == 0);
  CHECK(resumed.out.find("resumed from") != std::string::npos);

  CHECK(slurp(a / "ckpt" / "loss.csv") == slurp(b / "ckpt" / "loss.csv"));
  // The final model states agree too. The raw files differ only in the
  // embedded config text, which records each run's own directories.
  Checkpoint<float> ca = load_checkpoint<float>((a / "ckpt" / "ckpt_step40.gfc").string());
  Checkpoint<float> cb = load_checkpoint<float>((b / "ckpt" / "ckpt_step40.gfc").string());
  CHECK(ca.cursor.step == cb.cursor.step);
  CHECK(ca.cursor.rng_state == cb.cursor.rng_state);
  REQUIRE(ca.gen.params.size() == cb.gen.params.size());
  for (size_t i = 0; i < ca.gen.params.size(); ++i)
    CHECK(ca.gen.params[i].second == cb.gen.params[i].second);
  REQUIRE(ca.disc.params.size() == cb.disc.params.size());
  for (size_t i = 0; i < ca.disc.params.size(); ++i)
    CHECK(ca.disc.params[i].second == cb.disc.params[i].second);
  CHECK(ca.adam_g.t == cb.adam_g.t);
  CHECK(ca.adam_g.m == cb.adam_g.m);
  CHECK(ca.adam_d.v == cb.adam_d.v);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("train exits 1 on an invalid config and 3 on a missing one") {
  fs::path dir = fresh_dir("train_bad");
  write_text(dir / "bad.cfg", "[model]\nresolution = 200\n");
  RunResult r = run_cli("train --config " + (dir / "bad.cfg").string(), dir);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("resolution") != std::string::npos);
  CHECK(run_cli("train --config " + (dir / "absent.cfg").string(), dir).exit_code == 3);
  fs::remove_all(dir);
}

TEST_CASE("sample renders deterministic grids from a checkpoint") {
  fs::path dir = fresh_dir("sample");
  write_toy_dataset(dir / "imgs", 12, 8, 55);
  write_text(dir / "run.cfg", toy_config(dir, 20));
  REQUIRE(run_cli("train --config " + (dir / "run.cfg").string(), dir).exit_code == 0);
  const std::string ckpt = (dir / "ckpt" / "ckpt_step20.gfc").string();

  const std::string args = "sample --checkpoint " + ckpt +
                           " --truncation 0.5 --rows 2 --cols 3 --out " +
                           (dir / "grid.ppm").string() + " --seed 12";
  RunResult r1 = run_cli(args, dir);
  CHECK(r1.exit_code == 0);
  CHECK(r1.out.find("wrote") != std::string::npos);
  Image grid = read_ppm((dir / "grid.ppm").string());
  CHECK(grid.width == 24);
  CHECK(grid.height == 16);
  const std::string first = slurp(dir / "grid.ppm");
  REQUIRE(run_cli(args, dir).exit_code == 0);
  CHECK(slurp(dir / "grid.ppm") == first);

  CHECK(run_cli("sample --checkpoint " + ckpt + " --truncation 1.5 --out " +
                    (dir / "x.ppm").string(),
                dir)
            .exit_code == 1);
  CHECK(run_cli("sample --checkpoint " + (dir / "nope.gfc").string() + " --out " +
                    (dir / "y.ppm").string(),
                dir)
            .exit_code == 3);

  // Corrupt a copy: the checksum must turn this into an io failure.
  std::string bytes = slurp(ckpt);
  bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x20);
  write_text(dir / "bad.gfc", bytes);
  CHECK(run_cli("sample --checkpoint " + (dir / "bad.gfc").string() + " --out " +
                    (dir / "z.ppm").string(),
                dir)
            .exit_code == 3);
  fs::remove_all(dir);
}

TEST_CASE("compare-truncation emits two grids and a stats table") {
  fs::path dir = fresh_dir("cmp");
  write_toy_dataset(dir / "imgs", 12, 8, 56);
  write_text(dir / "run.cfg", toy_config(dir, 20));
  REQUIRE(run_cli("train --config " + (dir / "run.cfg").string(), dir).exit_code == 0);
  const std::string ckpt = (dir / "ckpt" / "ckpt_step20.gfc").string();

  RunResult r = run_cli("compare-truncation --checkpoint " + ckpt +
                            " --c1 1.0 --c2 0.25 --n 9 --out " + (dir / "cmp").string() +
                            " --seed 4",
                        dir);
  CHECK(r.exit_code == 0);
  Image g1 = read_ppm((dir / "cmp" / "grid_bound_1.ppm").string());
  Image g2 = read_ppm((dir / "cmp" / "grid_bound_2.ppm").string());
  CHECK(g1.width == 24);
  CHECK(g1.height == 24);
  CHECK(g2.width == 24);

  const std::string stats = slurp(dir / "cmp" / "stats.csv");
  CHECK(count_lines(stats) == 3);
  CHECK(stats.rfind("bound,pixel_variance,mean_pairwise_distance\n", 0) == 0);
  CHECK(stats.find("\n1,") != std::string::npos);
  CHECK(stats.find("\n0.25,") != std::string::npos);

  CHECK(run_cli("compare-truncation --checkpoint " + ckpt + " --c1 0.5 --c2 0.5 --n 4 --out " +
                    (dir / "same").string(),
                dir)
            .exit_code == 1);
  fs::remove_all(dir);
}

TEST_CASE("grad-check passes by default and fails its negative control") {
  fs::path dir = fresh_dir("gc");
  RunResult ok = run_cli("grad-check", dir);
  CHECK(ok.exit_code == 0);
  for (const char* op : {"conv2d", "conv_transpose2d", "batch_norm", "dense", "relu",
                         "toy_generator", "toy_discriminator", "composed_g_d"}) {
    CHECK(ok.out.find(op) != std::string::npos);
  }
  CHECK(ok.out.find("FAIL") == std::string::npos);

  RunResult bad = run_cli("grad-check --preset negative-control", dir);
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.find("corrupted_scale") != std::string::npos);
  CHECK(bad.out.find("FAIL") != std::string::npos);

  CHECK(run_cli("grad-check --preset nonsense", dir).exit_code == 1);
  fs::remove_all(dir);
}

TEST_CASE("dataset-scan reports composition and writes a manifest") {
  fs::path dir = fresh_dir("scan");
  write_toy_dataset(dir / "imgs", 3, 4, 77);   // undersized for resolution 8
  write_toy_dataset(dir / "imgs2", 3, 16, 78); // large enough; separate seed dir
  for (auto& entry : fs::directory_iterator(dir / "imgs2"))
    fs::rename(entry.path(), dir / "imgs" / ("big_" + entry.path().filename().string()));
  write_text(dir / "imgs" / "broken.ppm", "P6 but not really");

  RunResult r = run_cli("dataset-scan --dir " + (dir / "imgs").string() +
                            " --resolution 8 --out " + (dir / "m.csv").string(),
                        dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("images=6") != std::string::npos);
  CHECK(r.out.find("skipped=1") != std::string::npos);
  CHECK(r.out.find("undersized_fraction=0.5") != std::string::npos);
  CHECK(fs::exists(dir / "m.csv"));

  CHECK(run_cli("dataset-scan --dir " + (dir / "void").string() + " --resolution 8", dir)
            .exit_code == 3);
  fs::remove_all(dir);
}
