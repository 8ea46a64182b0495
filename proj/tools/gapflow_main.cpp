#include <CLI11.hpp>

#include "gapflow/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gapflow: spectral analysis and gap certification for Kraus-tuple spin chains"};
  app.require_subcommand(1);

  gapflow::RunConfig config;

  auto add_common = [&](CLI::App* cmd, bool needs_b) {
    cmd->add_option("--input", config.input, "tuple file (JSON)")->required();
    if (needs_b) cmd->add_option("--input-b", config.input_b, "second tuple file (JSON)");
    cmd->add_option("--m", config.m, "interaction length");
    cmd->add_option("--m2", config.m2, "second interaction length");
    cmd->add_option("--l", config.l, "gap window length");
    cmd->add_option("--N", config.N, "chain length");
    cmd->add_option("--grid", config.grid, "grid points for sweeps");
    cmd->add_option("--seed", config.seed, "random seed");
    cmd->add_option("--out", config.out, "output directory");
    cmd->add_option("--tol-ker", config.tol_ker, "kernel tolerance");
    cmd->add_option("--dense-cap", config.dense_cap, "dense diagonalization cap");
    cmd->add_option("--threads", config.threads, "parallel workers (or GAPFLOW_THREADS)");
    cmd->add_flag("--allow-outside-window", config.allow_outside_window,
                  "report the gap-inequality margin outside the proven window");
  };

  add_common(app.add_subcommand("analyze", "transfer spectrum, Wielandt index, gap constants"),
             false);
  add_common(app.add_subcommand("groundspace", "injectivity and intersection table"), false);
  add_common(app.add_subcommand("gap", "kernel, gap, and the PSD gap inequality"), false);
  add_common(app.add_subcommand("edge", "edge-state frustration, surjectivity, decay"), false);
  add_common(app.add_subcommand("connect", "build and normalize a two-tuple path"), true);
  add_common(app.add_subcommand("verify-path", "connect + uniform-gap certificate"), true);
  add_common(app.add_subcommand("mix-lengths", "interaction-length mixing certificate"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  config.command = app.get_subcommands().front()->get_name();
  return gapflow::run(config);
}
