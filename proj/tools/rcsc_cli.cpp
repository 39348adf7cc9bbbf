#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rcsc/rcsc.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Random connection simplicial complexes: sampling, moments and normal approximation"};
  std::string config_path;
  rcsc::Overrides over;
  app.add_option("--config", config_path, "Run configuration (INI)")->required();
  app.add_option("--seed", over.seed, "Master seed (unsigned 64-bit)");
  app.add_option("--out", over.out, "Output directory");
  app.add_option("--threads", over.threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--task", over.task, "sample, moments, gamma, clt or render");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rcsc::kExitOk : rcsc::kExitConfig;
  }

  try {
    const auto config = rcsc::load_config(config_path, over);
    const auto artifacts = rcsc::run_task(config);
    rcsc::write_artifacts(config, artifacts);
    std::cout << "wrote " << artifacts.files.size() + 1 << " files to " << config.out << '\n';
    return rcsc::kExitOk;
  } catch (const rcsc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return rcsc::kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return rcsc::kExitIo;
  } catch (const rcsc::HypothesisError& e) {
    std::cerr << "hypothesis check failed: " << e.what() << '\n';
    return rcsc::kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rcsc::kExitFailure;
  }
}
