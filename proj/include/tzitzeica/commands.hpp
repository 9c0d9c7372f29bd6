#pragma once

// The batch commands behind the command-line front-end. Each one takes a
// parsed RunConfig and produces a CSV or JSON document; the caller decides
// where it goes.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "tzitzeica/config.hpp"
#include "tzitzeica/field.hpp"
#include "tzitzeica/verify.hpp"

namespace tz::commands {

enum ExitCode : int { ok = 0, verify_failed = 1, config_error = 2, numerical_failure = 3 };

struct RunOptions {
  int threads = 1;
  // Drives the random sample points of the route-equivalence check.
  std::uint64_t seed = 1;
};

// The field described by cfg: a dressed vacuum, or a finite-gap background
// without solitons.
std::unique_ptr<FieldSource> make_source(const config::RunConfig& cfg);

FieldGrid field_grid(const config::RunConfig& cfg, const RunOptions& opts = {});
void write_field_csv(std::ostream& out, const FieldGrid& field);
// Reads what write_field_csv wrote; the grid is recovered from the rows.
// Throws ConfigError on anything else.
FieldGrid read_field_csv(std::istream& in);

nlohmann::json verify_report(const config::RunConfig& cfg, const RunOptions& opts = {});
// File mode: residual of a sampled light-cone field.
nlohmann::json verify_field_file(const FieldGrid& field, const config::RunConfig& cfg);

verify::ScanResult scan(const config::RunConfig& cfg, const RunOptions& opts = {});
void write_scan_csv(std::ostream& out, const verify::ScanResult& result);

nlohmann::json velocities_report(const config::RunConfig& cfg);

// One-line JSON description of a failure, for standard error.
std::string error_json(const std::string& kind, const std::string& message,
                       const std::string& key = {});

// Fixed-format float for CSV cells: 17 significant digits, "nan" for NaN.
std::string format_double(double v);

}  // namespace tz::commands
