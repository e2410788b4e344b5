#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace radpair::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_error = 3;

struct Table {
  // Emitted as "# key=value" comment lines; the first entry is always spec_hash.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

struct Preset {
  std::string name;
  std::string command;
  std::string summary;
};

const std::vector<Preset>& presets();

// args excludes the program name.  Output documents go to --out (or to `out` when absent).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radpair::cli
