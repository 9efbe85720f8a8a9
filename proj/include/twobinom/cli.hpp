#pragma once

// Request handling behind the command-line tool: one validated request in, one serialized
// report and exit status out.

#include "twobinom/opchar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace twobinom {

enum class Command { test, ci, region, diagnose, power, size, sweep };
enum class OutputFormat { json, csv, text };

std::string_view to_string(Command c);
Command parse_command(std::string_view s);
OutputFormat parse_format(std::string_view s);

struct RequestSpec {
  Command command = Command::test;
  /// x1/x2 are unused by power, size and sweep.
  std::optional<int> x1;
  int n1 = 0;
  std::optional<int> x2;
  int n2 = 0;
  std::string measure = "difference";
  std::string method = "fisher-central";
  /// Second method for `sweep`; the grid then holds power(method) - power(compare).
  std::optional<std::string> compare;
  std::string alternative = "two.sided";
  /// Defaults to the equality value of the measure.
  std::optional<double> beta0;
  double level = 0.95;
  double alpha = 0.05;
  bool midp = false;
  std::optional<double> berger_boos;
  bool em = false;
  int beta_grid_points = 2001;
  int sup_grid_points = 1001;
  /// beta0 grid for diagnose.
  int diagnose_grid_points = 201;
  double theta1 = 0.5;
  double theta2 = 0.5;
  int sweep_points = 25;
  double band = 0.025;
  OutputFormat format = OutputFormat::json;
};

struct RunResult {
  /// 0 success, 2 invalid request, 3 compute budget exceeded, 1 other failure.
  int status = 0;
  std::string output;
  std::string error;
};

/// Validates the request, then computes and serializes the report.
RunResult run(const RequestSpec& request);

}  // namespace twobinom
