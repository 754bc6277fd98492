// kanvmc: train, diagonalize, measure and benchmark spin-chain wavefunctions.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kanvmc/checkpoint.hpp"
#include "kanvmc/errors.hpp"
#include "kanvmc/run.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool desk_scale = false;
  std::string checkpoint;
  bool quiet = false;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Options& o,
                      bool needs_checkpoint = false) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "Output directory (overrides output.dir)");
  sub->add_option("--seed", o.seed, "Seed for both model initialisation and sampling");
  sub->add_option("--threads", o.threads, "Worker threads for linear algebra")->check(CLI::NonNegativeNumber);
  sub->add_flag("--desk-scale", o.desk_scale, "Apply the config's reduced desk_scale block");
  sub->add_flag("-q,--quiet", o.quiet, "No progress output");
  if (needs_checkpoint) {
    sub->add_option("--checkpoint", o.checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  }
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational Monte Carlo for SineKAN, MLP and RBM wavefunctions on spin chains"};
  app.require_subcommand(1);
  Options o;
  auto* train = add_command(app, "train", "Train a model and write history, checkpoint and results", o);
  auto* ed = add_command(app, "ed", "Exact diagonalization of the configured Hamiltonian", o);
  auto* observe = add_command(app, "observe", "Observable series of a checkpointed model", o, true);
  auto* fid = add_command(app, "fidelity", "Ground-space fidelity of a checkpointed model", o, true);
  auto* bench = add_command(app, "bench", "Forward-pass latency across chain lengths", o);
  auto* validate = add_command(app, "validate", "Resolve and check a configuration", o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    kanvmc::LoadOptions load;
    load.desk_scale = o.desk_scale;
    load.seed = o.seed;
    if (!o.out.empty()) load.out = o.out;
    const kanvmc::RunConfig cfg = kanvmc::load_config(o.config, load);
    kanvmc::set_threads(o.threads);
    kanvmc::RunContext ctx;
    if (!o.quiet) ctx.log = &std::cerr;

    kanvmc::Json rec;
    if (train->parsed()) rec = kanvmc::cmd_train(cfg, ctx);
    else if (ed->parsed()) rec = kanvmc::cmd_ed(cfg, ctx);
    else if (observe->parsed()) rec = kanvmc::cmd_observe(cfg, o.checkpoint, ctx);
    else if (fid->parsed()) rec = kanvmc::cmd_fidelity(cfg, o.checkpoint, ctx);
    else if (bench->parsed()) rec = kanvmc::cmd_bench(cfg, ctx);
    else if (validate->parsed()) rec = kanvmc::cmd_validate(cfg);
    rec.erase("source");
    std::cout << rec.dump(2) << std::endl;
    return 0;
  } catch (const kanvmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const kanvmc::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << '\n';
    return 2;
  } catch (const kanvmc::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
