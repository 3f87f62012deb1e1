// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "emloc/commands.hpp"

namespace
{

void add_common(CLI::App *cmd, emloc::CommandOptions &opt, std::string &format)
{
  cmd->add_option("--scenario", opt.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option_function<std::string>(
      "--out", [&opt](const std::string &p) { opt.out = p; }, "Output directory (default: scenario output_dir)");
  cmd->add_option("--threads", opt.threads, "Worker threads, 0 = all cores, 1 = byte-reproducible")
      ->default_val(1);
  cmd->add_option("--format", format, "Array format for written containers")
      ->check(CLI::IsMember({"csv", "bin"}))
      ->default_val("csv");
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Electromagnetic source localization: forward simulation, phase-conjugation imaging, "
               "l1-regularized inversion and self-validation."};
  app.require_subcommand(1);

  emloc::CommandOptions opt;
  std::string format = "csv";

  CLI::App *fwd = app.add_subcommand("forward", "Simulate boundary data for the scenario's sources");
  add_common(fwd, opt, format);

  CLI::App *img = app.add_subcommand("image", "Phase-conjugation images from boundary data");
  add_common(img, opt, format);
  img->add_option_function<std::string>(
      "--data", [&opt](const std::string &p) { opt.data = p; }, "Boundary data metadata (default: <out>/data.json)");

  CLI::App *inv = app.add_subcommand("invert", "l1-regularized inversion of the frequency images");
  add_common(inv, opt, format);
  inv->add_option_function<std::string>(
      "--images", [&opt](const std::string &p) { opt.images = p; },
      "Image stack index (default: <out>/images.json)");

  CLI::App *val = app.add_subcommand("validate", "Kernel, identity and solver self-checks");
  add_common(val, opt, format);
  val->add_flag("--skip-rates", opt.skip_rates, "Omit the convergence-rate measurements");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : emloc::exit_error;
  }

  try
  {
    opt.format = emloc::parse_array_format(format);
  }
  catch (const std::exception &e)
  {
    std::cerr << e.what() << '\n';
    return emloc::exit_error;
  }

  if (fwd->parsed())
    return emloc::cmd_forward(opt, std::cout, std::cerr);
  if (img->parsed())
    return emloc::cmd_image(opt, std::cout, std::cerr);
  if (inv->parsed())
    return emloc::cmd_invert(opt, std::cout, std::cerr);
  return emloc::cmd_validate(opt, std::cout, std::cerr);
}
