#include "rasc/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "rasc/errors.hpp"

namespace rasc {

std::string fmt_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open " + path + " for writing");
  os << content;
  if (!os) throw io_error("write failed: " + path);
}

void write_manifest(const Manifest& m, const std::string& data_path) {
  nlohmann::json j;
  j["subcommand"] = m.subcommand;
  j["params"] = m.params;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["wall_ms"] = m.wall_ms;
  j["outputs"] = m.outputs;
  write_text_file(data_path + ".manifest.json", j.dump(2) + "\n");
}

}  // namespace rasc
