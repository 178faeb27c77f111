#include <iostream>

#include "CLI11.hpp"
#include "abnormal/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"abnormal trajectory toolkit"};
  abnormal::RunOptions opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config_path, "config file")->required();
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--command", opt.command, "command")->required()->check(CLI::IsMember(abnormal::kCommands));
  auto* so = app.add_option("--seed-override", seed, "replace the config seed");
  app.add_option("--threads", opt.threads, "sampler threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*so) opt.seed_override = seed;
  return abnormal::run(opt, std::cerr);
}
