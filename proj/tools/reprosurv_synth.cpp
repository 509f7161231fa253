// Writes a seeded synthetic study CSV with planted hazard effects.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "reprosurv/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic study table in the expected CSV layout."};
  reprosurv::SyntheticOptions options;
  std::string out;
  app.add_option("--rows", options.rows, "Number of papers")->capture_default_str();
  app.add_option("--seed", options.seed, "Generator seed")->capture_default_str();
  app.add_option("--out", out, "Output CSV path (default: stdout)");
  CLI11_PARSE(app, argc, argv);

  const std::string text = reprosurv::synthetic_study_csv(options);
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot write " << out << "\n";
    return 2;
  }
  file << text;
  return 0;
}
