// vacuumsq command-line front end.
//
//   vacuumsq <evolve|optimize|scaling|oracle|feasibility|validate> --config <path>
//            [--out <dir>] [--threads <n>] [--seed <n>]
//
// Exit codes: 0 ok, 2 config, 3 physics, 4 numerics, 5 I/O. Failures print a
// single JSON object on stderr.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vacuumsq/vacuumsq.hpp"

namespace {

int exit_code(vacuumsq::ErrorKind k) {
  switch (k) {
    case vacuumsq::ErrorKind::config: return 2;
    case vacuumsq::ErrorKind::physics: return 3;
    case vacuumsq::ErrorKind::numerics: return 4;
    case vacuumsq::ErrorKind::io: return 5;
  }
  return 1;
}

int report(const std::string& kind, const std::string& msg, int code) {
  nlohmann::json j = {{"error", kind}, {"message", msg}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

std::filesystem::path output_dir(const std::string& flag, const vacuumsq::RunConfig& c) {
  if (!flag.empty()) return flag;
  if (c.output.dir) return *c.output.dir;
  if (const char* env = std::getenv("VACUUMSQ_OUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace vacuumsq;
  CLI::App app{"Vacuum spin-squeezing simulator and optimizer"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  unsigned threads = 1;
  long long seed = 0;
  const char* names[] = {"evolve", "optimize", "scaling", "oracle", "feasibility", "validate"};
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads for scans")->check(CLI::Range(1u, 256u));
    sub->add_option("--seed", seed, "reserved; all computations are deterministic");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("config", e.what(), 2);
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    const RunConfig cfg = parse_config_text(read_file(config_path));
    if (name == "validate") {
      std::cout << validate_config(cfg).dump(2) << '\n';
      return 0;
    }
    const Command cmd = parse_command(name);
    if (cfg.command && *cfg.command != cmd)
      fail(ErrorKind::config, std::string("config is for command '") + to_string(*cfg.command) +
                                  "', not '" + name + "'");
    const auto dir = output_dir(out_dir, cfg);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory " + dir.string());
    const auto artifacts = run_command(cmd, cfg, threads);
    write_artifacts(artifacts, dir);
    for (const auto& f : artifacts.files) std::cout << (dir / f.first).string() << '\n';
    return 0;
  } catch (const Error& e) {
    return report(to_string(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const nlohmann::json::exception& e) {
    return report("config", e.what(), 2);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 1);
  }
}
