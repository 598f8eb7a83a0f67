#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ganforge/commands.hpp"
#include "ganforge/errors.hpp"

namespace {

// Exit codes: 0 success, 1 usage or configuration, 2 numeric, 3 I/O.
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DCGAN-style trainer with truncated-latent sampling"};
  app.require_subcommand(1);

  std::string config_path, resume_path;
  auto* train = app.add_subcommand("train", "Train per a config file");
  train->add_option("--config", config_path, "Run config file")->required();
  train->add_option("--resume", resume_path, "Checkpoint to resume from");

  std::string ckpt_path, out_path;
  double truncation = 1.0;
  int rows = 1, cols = 1;
  uint64_t seed = 0;
  auto* sample = app.add_subcommand("sample", "Render a sample grid from a checkpoint");
  sample->add_option("--checkpoint", ckpt_path, "Checkpoint file")->required();
  sample->add_option("--truncation", truncation, "Latent bound c in (0, 1]");
  sample->add_option("--rows", rows, "Grid rows");
  sample->add_option("--cols", cols, "Grid columns");
  sample->add_option("--out", out_path, "Output PPM path")->required();
  sample->add_option("--seed", seed, "Sampling seed");

  double c1 = 1.0, c2 = 0.5;
  int n = 256;
  std::string cmp_ckpt, cmp_dir;
  uint64_t cmp_seed = 0;
  auto* compare =
      app.add_subcommand("compare-truncation", "Emit grids and statistics for two latent bounds");
  compare->add_option("--checkpoint", cmp_ckpt, "Checkpoint file")->required();
  compare->add_option("--c1", c1, "Wider bound");
  compare->add_option("--c2", c2, "Narrower bound");
  compare->add_option("--n", n, "Samples per bound");
  compare->add_option("--out", cmp_dir, "Output directory")->required();
  compare->add_option("--seed", cmp_seed, "Sampling seed shared by both bounds");

  std::string preset = "default";
  auto* gradcheck = app.add_subcommand("grad-check", "Verify gradients against finite differences");
  gradcheck->add_option("--preset", preset, "'default' or 'negative-control'");

  std::string scan_dir, manifest_out;
  int scan_resolution = 0;
  auto* scan = app.add_subcommand("dataset-scan", "Ingest a directory and report its manifest");
  scan->add_option("--dir", scan_dir, "Dataset directory")->required();
  scan->add_option("--resolution", scan_resolution, "Target resolution")->required();
  scan->add_option("--out", manifest_out, "Write the manifest CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (train->parsed()) return ganforge::cmd_train(config_path, resume_path);
    if (sample->parsed())
      return ganforge::cmd_sample(ckpt_path, truncation, rows, cols, out_path, seed);
    if (compare->parsed())
      return ganforge::cmd_compare_truncation(cmp_ckpt, c1, c2, n, cmp_dir, cmp_seed);
    if (gradcheck->parsed()) return ganforge::cmd_grad_check(preset);
    if (scan->parsed())
      return ganforge::cmd_dataset_scan(scan_dir, scan_resolution, manifest_out);
  } catch (const ganforge::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ganforge::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const ganforge::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return 0;
}
