// sktcrn: reaction network analysis and SKT cross-diffusion simulation.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "CLI11.hpp"
#include "skt/errors.hpp"
#include "skt/report.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw skt::ParseError(0, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

skt::ReactionNetwork load_network(const fs::path& path) {
  std::vector<skt::ParseWarning> warnings;
  auto network = skt::parse_network(read_file(path), &warnings);
  for (const auto& w : warnings) {
    std::cerr << path.string() << ":" << w.line << ": warning: " << w.message << "\n";
  }
  return network;
}

skt::SimulationSetup load_setup(const fs::path& cfg_path, std::optional<std::uint64_t> seed) {
  skt::SimulationSetup setup;
  setup.config = skt::parse_config(read_file(cfg_path));
  if (setup.config.network_path.empty()) throw skt::ParseError(0, "config has no network entry");
  fs::path net = setup.config.network_path;
  if (net.is_relative()) net = cfg_path.parent_path() / net;
  setup.network = load_network(net);
  if (seed) setup.config.seed = *seed;
  return setup;
}

skt::Vector parse_mass(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw skt::ParseError(0, "bad mass entry '" + item + "'");
    }
    values.push_back(v);
  }
  return Eigen::Map<skt::Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/// Writes every file to a temporary sibling first, then renames them all.
void write_atomically(const std::vector<std::pair<fs::path, std::string>>& files) {
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const auto& [path, content] : files) {
      fs::path tmp = path;
      tmp += ".tmp" + std::to_string(::getpid());
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      staged.emplace_back(tmp, path);
      out << content;
      out.close();
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    for (const auto& [tmp, path] : staged) fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    for (const auto& [tmp, path] : staged) fs::remove(tmp, ec);
    throw;
  }
}

int report_error(const std::string& kind, const std::string& message, int code) {
  const nlohmann::json j = {{"error", kind}, {"message", message}, {"exit", code}};
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction network analysis and SKT cross-diffusion simulation"};
  app.require_subcommand(1, 1);
  std::optional<std::uint64_t> seed;

  std::string crn_path, cfg_path, mass_text, out_dir;
  auto* analyze = app.add_subcommand("analyze", "Conservation laws, deficiency, equilibria, boundary faces");
  analyze->add_option("network", crn_path, "Reaction network (.crn)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--mass", mass_text, "Conserved masses v1,...,vm (default Q 1)");
  analyze->add_option("--seed", seed, "Multistart seed");

  auto* equilibrium = app.add_subcommand("equilibrium", "Complex-balanced equilibrium for a mass vector");
  equilibrium->add_option("network", crn_path, "Reaction network (.crn)")->required()->check(CLI::ExistingFile);
  equilibrium->add_option("--mass", mass_text, "Conserved masses v1,...,vm");
  equilibrium->add_option("--seed", seed, "Multistart seed");

  auto* simulate = app.add_subcommand("simulate", "Run the finite-volume solver");
  simulate->add_option("config", cfg_path, "Run configuration (.cfg)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the config seed");

  auto* check = app.add_subcommand("check", "Structural conditions and boundary scan only");
  check->add_option("config", cfg_path, "Run configuration (.cfg)")->required()->check(CLI::ExistingFile);
  check->add_option("--seed", seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), 1);
  }

  try {
    if (*analyze) {
      std::optional<skt::Vector> mass;
      if (!mass_text.empty()) mass = parse_mass(mass_text);
      std::cout << skt::network_report(load_network(crn_path), mass, seed.value_or(0)).dump(2) << "\n";
    } else if (*equilibrium) {
      const skt::Vector mass = mass_text.empty() ? skt::Vector() : parse_mass(mass_text);
      std::cout << skt::equilibrium_report(load_network(crn_path), mass, seed.value_or(0)).dump(2) << "\n";
    } else if (*check) {
      std::cout << skt::check_report(load_setup(cfg_path, seed)).dump(2) << "\n";
    } else if (*simulate) {
      const auto setup = load_setup(cfg_path, seed);
      std::vector<std::string> warnings;
      const auto traj = skt::simulate(setup, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      std::ostringstream csv;
      skt::write_trajectory_csv(csv, traj);
      const std::string summary = skt::summary_report(skt::summarize(traj)).dump(2) + "\n";
      fs::create_directories(out_dir);
      write_atomically({{fs::path(out_dir) / "trajectory.csv", csv.str()},
                        {fs::path(out_dir) / "summary.json", summary}});
    }
  } catch (const skt::ParseError& e) {
    return report_error(e.kind(), e.what(), 1);
  } catch (const skt::NoComplexBalance& e) {
    return report_error(e.kind(), e.what(), 2);
  } catch (const skt::MassNotReachable& e) {
    return report_error(e.kind(), e.what(), 2);
  } catch (const skt::DiffusionConditionError& e) {
    return report_error(e.kind(), e.what(), 3);
  } catch (const skt::StepFailed& e) {
    return report_error(e.kind(), e.what(), 4);
  } catch (const std::invalid_argument& e) {
    return report_error("InvalidInput", e.what(), 1);
  } catch (const std::exception& e) {
    return report_error("Error", e.what(), 4);
  }
  return 0;
}
