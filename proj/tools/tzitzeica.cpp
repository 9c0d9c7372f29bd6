// Command-line front-end: tzitzeica {field,verify,scan,velocities} --config run.json

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "tzitzeica/commands.hpp"
#include "tzitzeica/config.hpp"
#include "tzitzeica/errors.hpp"

namespace cmd = tz::commands;

namespace {

// Writes through a callback to path, or to stdout when there is none.
template <class Fn>
void emit(const std::optional<std::string>& path, Fn&& write) {
  if (!path) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw tz::ConfigError("cannot write " + *path, "output");
  write(out);
  out.close();
  if (!out) throw tz::ConfigError("write failed for " + *path, "output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soliton solutions of u_xt = e^u - e^{-2u} on finite-gap backgrounds"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::string> field_path;
  cmd::RunOptions opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_path, "Output file; overrides the config, stdout if neither");
    sub->add_option("--threads", opts.threads, "Worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--seed", opts.seed, "Seed for randomized sample points");
  };
  auto* field = app.add_subcommand("field", "Sample the field on the grid (CSV)");
  auto* verify = app.add_subcommand("verify", "Run the verification suite (JSON)");
  auto* scan = app.add_subcommand("scan", "List grid nodes next to zeros of the determinant (CSV)");
  auto* vel = app.add_subcommand("velocities", "Soliton kinematics (JSON)");
  for (auto* s : {field, verify, scan, vel}) add_common(s);
  verify->add_option("--field", field_path, "Check a field CSV written by `field` instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << cmd::error_json("usage", e.what()) << '\n';
    return cmd::config_error;
  }

  try {
    const auto cfg = tz::config::load_config(config_path);
    const auto& o = cfg.output;
    if (*field) {
      const auto f = cmd::field_grid(cfg, opts);
      emit(out_path ? out_path : o.field, [&](std::ostream& s) { cmd::write_field_csv(s, f); });
    } else if (*verify) {
      nlohmann::json report;
      if (field_path) {
        std::ifstream in(*field_path);
        if (!in) throw tz::ConfigError("cannot open field file " + *field_path, "field");
        report = cmd::verify_field_file(cmd::read_field_csv(in), cfg);
      } else {
        report = cmd::verify_report(cfg, opts);
      }
      emit(out_path ? out_path : o.verify, [&](std::ostream& s) { s << report.dump(2) << '\n'; });
      if (!report["pass"].get<bool>()) return cmd::verify_failed;
    } else if (*scan) {
      const auto r = cmd::scan(cfg, opts);
      emit(out_path ? out_path : o.scan, [&](std::ostream& s) { cmd::write_scan_csv(s, r); });
    } else {
      const auto report = cmd::velocities_report(cfg);
      emit(out_path ? out_path : o.velocities,
           [&](std::ostream& s) { s << report.dump(2) << '\n'; });
    }
  } catch (const tz::ConfigError& e) {
    std::cerr << cmd::error_json("config", e.what(), e.key()) << '\n';
    return cmd::config_error;
  } catch (const tz::NumericalError& e) {
    std::cerr << cmd::error_json("numerical", e.what()) << '\n';
    return cmd::numerical_failure;
  } catch (const std::exception& e) {
    std::cerr << cmd::error_json("internal", e.what()) << '\n';
    return cmd::numerical_failure;
  }
  return cmd::ok;
}
