#include "twobinom/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common(CLI::App* sub, twobinom::RequestSpec& r, std::string& format) {
  sub->add_option("--x1", r.x1, "successes in group 1");
  sub->add_option("--n1", r.n1, "trials in group 1")->required();
  sub->add_option("--x2", r.x2, "successes in group 2");
  sub->add_option("--n2", r.n2, "trials in group 2")->required();
  sub->add_option("--measure", r.measure, "difference | ratio | oddsratio")->capture_default_str();
  sub->add_option("--method", r.method, "method identifier: " + twobinom::method_catalog())->capture_default_str();
  sub->add_option("--alternative", r.alternative, "less | greater | two.sided | two.sided.minlike")
      ->capture_default_str();
  sub->add_option("--null", r.beta0, "null value beta0 (default: equality)");
  sub->add_option("--level", r.level, "confidence level")->capture_default_str();
  sub->add_option("--alpha", r.alpha, "significance level for power, size and sweep")->capture_default_str();
  sub->add_flag("--midp", r.midp, "mid-p version");
  sub->add_option("--berger-boos", r.berger_boos, "Berger-Boos gamma");
  sub->add_flag("--em", r.em, "E+M ordering");
  sub->add_option("--beta-grid", r.beta_grid_points, "beta0 grid points for interval inversion")
      ->capture_default_str();
  sub->add_option("--sup-grid", r.sup_grid_points, "nuisance grid points for the supremum")->capture_default_str();
  sub->add_option("--format", format, "json | csv | text")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact inference for two independent binomial samples"};
  app.require_subcommand(1);
  twobinom::RequestSpec r;
  std::string format = "json";

  const std::pair<twobinom::Command, const char*> commands[] = {
      {twobinom::Command::test, "p-values for one null value"},
      {twobinom::Command::ci, "confidence interval"},
      {twobinom::Command::region, "confidence region and its matching interval"},
      {twobinom::Command::diagnose, "triple with compatibility, nestedness and coherence checks"},
      {twobinom::Command::power, "exact power at (theta1, theta2)"},
      {twobinom::Command::size, "exact size over the null boundary"},
      {twobinom::Command::sweep, "power over a (theta1, theta2) grid"},
  };
  for (const auto& [cmd, help] : commands) {
    auto* sub = app.add_subcommand(std::string(twobinom::to_string(cmd)), help);
    add_common(sub, r, format);
    sub->callback([&r, c = cmd] { r.command = c; });
    if (cmd == twobinom::Command::diagnose)
      sub->add_option("--diagnose-grid", r.diagnose_grid_points, "beta0 grid points for the checks")
          ->capture_default_str();
    if (cmd == twobinom::Command::power) {
      sub->add_option("--theta1", r.theta1)->required();
      sub->add_option("--theta2", r.theta2)->required();
    }
    if (cmd == twobinom::Command::sweep) {
      sub->add_option("--points", r.sweep_points, "grid points per axis")->capture_default_str();
      sub->add_option("--compare", r.compare, "second method; the grid holds the power difference");
      sub->add_option("--band", r.band, "half-width of the near-zero band")->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    r.format = twobinom::parse_format(format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const auto res = twobinom::run(r);
  if (res.status != 0) {
    std::cerr << "error: " << res.error << "\n";
    return res.status;
  }
  std::cout << res.output;
  return 0;
}
