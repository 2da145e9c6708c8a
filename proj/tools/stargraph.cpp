// Command-line front end: stargraph <experiment> --config PATH [--out DIR] [--grid-n N] [--hbar H ...]

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "stargraph/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Wave packets and scattering on a star graph with Kirchhoff vertex conditions"};
  app.set_version_flag("--version", "stargraph 1.0");

  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::size_t grid_n = 0;
  std::vector<double> hbars;

  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(stargraph::experiment_ids()));
  app.add_option("--config,-c", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out,-o", out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--grid-n", grid_n, "Number of grid points (power of two)");
  app.add_option("--hbar", hbars, "hbar value(s); several values form a sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  stargraph::RunConfig config;
  try {
    std::ifstream in(config_path);
    config = stargraph::parse_config(in, experiment);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (grid_n != 0) config.n_points = grid_n;
    if (!hbars.empty()) config.hbars = hbars;
    stargraph::validate(config);
  } catch (const stargraph::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return stargraph::run(config);
}
