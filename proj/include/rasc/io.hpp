#pragma once

#include <map>
#include <string>
#include <vector>

namespace rasc {

// Floats in persisted CSV/JSON use 9 significant digits, fixed formatting
// across platforms.
std::string fmt_g9(double v);

void write_text_file(const std::string& path, const std::string& content);

struct Manifest {
  std::string subcommand;
  std::map<std::string, std::string> params;
  uint64_t seed = 0;
  std::string version;
  double wall_ms = 0.0;
  std::vector<std::string> outputs;
};

// Written next to each data output as <path>.manifest.json. Timing lives
// only here, so the data files stay byte-identical across reruns.
void write_manifest(const Manifest& m, const std::string& data_path);

}  // namespace rasc
