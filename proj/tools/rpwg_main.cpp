// Command-line driver: parses a config file and dispatches one of the
// subcommands limit / bands / converge / mesh-dump.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rpwg/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rpwg::Error(rpwg::ErrorCode::IO_ERROR, "cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet-Bloch band structure of a strip waveguide with periodic "
               "room-and-passage protuberances"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  unsigned seed = 0;  // reserved; all algorithms are deterministic
  app.add_option("--config", config_path, "path to the run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--threads", threads, "worker threads for the phase sweep");
  app.add_option("--seed", seed, "reserved, unused");

  auto* limit = app.add_subcommand("limit", "semi-analytic limit spectrum and gap edge");
  auto* bands = app.add_subcommand("bands", "FEM band structure over the Brillouin zone");
  auto* converge = app.add_subcommand("converge", "eps -> 0 convergence study and gap check");
  auto* meshdump = app.add_subcommand("mesh-dump", "write the period-cell meshes as text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    rpwg::RunConfig cfg;
    try {
      cfg = rpwg::parse_config(read_file(config_path));
    } catch (const rpwg::Error& e) {
      if (e.code() == rpwg::ErrorCode::IO_ERROR) throw;
      std::cerr << "config error: " << e.what() << "\n";
      return 3;
    }
    if (!out_dir.empty()) cfg.directory = out_dir;
    cfg.threads = std::max(1, threads);

    int rc = 0;
    if (limit->parsed()) rc = rpwg::cmd_limit(cfg);
    if (bands->parsed()) rc = rpwg::cmd_bands(cfg);
    if (converge->parsed()) rc = rpwg::cmd_converge(cfg);
    if (meshdump->parsed()) rc = rpwg::cmd_mesh_dump(cfg);
    if (rc == 0)
      std::cout << "wrote results to " << cfg.directory << "\n";
    else
      std::cout << "numerical check failed (see " << cfg.directory << ")\n";
    return rc;
  } catch (const rpwg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case rpwg::ErrorCode::IO_ERROR:
        return 2;
      case rpwg::ErrorCode::PARSE_ERROR:
      case rpwg::ErrorCode::VALIDATION_ERROR:
        return 3;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
