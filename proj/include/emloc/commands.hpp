// SPDX-License-Identifier: Apache-2.0

#ifndef EMLOC_COMMANDS_HPP
#define EMLOC_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <ostream>

#include "emloc/container.hpp"

namespace emloc
{

// Process exit codes shared by all subcommands.
enum ExitCode : int
{
  exit_ok = 0,
  exit_failed = 1, // a validation check missed its tolerance, or the solver diverged
  exit_error = 2   // bad usage, invalid scenario, geometry violation, unreadable input
};

struct CommandOptions
{
  std::filesystem::path scenario;
  std::optional<std::filesystem::path> out;    // defaults to the scenario's output_dir
  unsigned threads = 1;                        // 0 = all hardware threads
  ArrayFormat format = ArrayFormat::csv;
  std::optional<std::filesystem::path> data;   // image: boundary data metadata, default <out>/data.json
  std::optional<std::filesystem::path> images; // invert: image stack index, default <out>/images.json
  bool skip_rates = false;                     // validate: omit the convergence-rate section
};

// forward: data.json (+ mesh and data arrays) and source.json.
int cmd_forward(const CommandOptions &opt, std::ostream &log, std::ostream &err);
// image: images.json, image_NNN.json, optional broadband.json, PGM slices, image_report.json.
int cmd_image(const CommandOptions &opt, std::ostream &log, std::ostream &err);
// invert: j_lambda.json, trace.csv, summary.json, j_lambda.pgm.
int cmd_invert(const CommandOptions &opt, std::ostream &log, std::ostream &err);
// validate: report.json and report.txt.
int cmd_validate(const CommandOptions &opt, std::ostream &log, std::ostream &err);

} // namespace emloc

#endif // EMLOC_COMMANDS_HPP
