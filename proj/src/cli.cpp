#include "twobinom/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace twobinom {

namespace {

using Json = nlohmann::ordered_json;

Json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return std::strtod(buf, nullptr);
}

std::string scalar_text(const Json& j) {
  if (j.is_null()) return "NA";
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", j.get<double>());
    return buf;
  }
  return j.dump();
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, scalar_text(j));
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string render(const Json& report, OutputFormat f) {
  if (f == OutputFormat::json) return report.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> kv;
  flatten(report, "", kv);
  std::string out;
  if (f == OutputFormat::text) {
    for (const auto& [k, v] : kv) out += k + ": " + v + "\n";
    return out;
  }
  std::string head;
  std::string row;
  for (const auto& [k, v] : kv) {
    head += (head.empty() ? "" : ",") + csv_field(k);
    row += (row.empty() ? "" : ",") + csv_field(v);
  }
  return head + "\n" + row + "\n";
}

Json ci_json(const ConfidenceInterval& ci) {
  Json j;
  j["lower"] = num(ci.lower);
  j["upper"] = num(ci.upper);
  j["level"] = num(ci.level);
  j["central"] = ci.central;
  j["holes_filled"] = ci.holes_filled;
  return j;
}

Json region_json(const ConfidenceRegion& r) {
  Json j;
  j["level"] = num(r.level);
  j["grid_resolution"] = num(r.grid_resolution);
  Json iv = Json::array();
  for (const auto& i : r.intervals) iv.push_back({{"lower", num(i.lower)}, {"upper", num(i.upper)}});
  j["intervals"] = iv;
  return j;
}

struct Resolved {
  MethodSpec method;
  Hypothesis hyp;
  std::optional<TwoByTwoData> data;
};

MethodSpec make_method(const RequestSpec& r, const std::string& id, EffectMeasure measure, Alternative alt) {
  MethodSpec m;
  m.id = parse_method(id);
  m.measure = measure;
  m.mode = r.midp ? TailMode::mid : TailMode::full;
  m.berger_boos_gamma = r.berger_boos;
  m.em = r.em;
  m.two_sided_ordering = alt == Alternative::two_sided_minlike || alt == Alternative::two_sided_blaker;
  m.uncond.grid_points = r.sup_grid_points;
  m.ci_grid.points = r.beta_grid_points;
  return m;
}

Resolved resolve(const RequestSpec& r) {
  Resolved out;
  const auto measure = parse_measure(r.measure);
  const auto alt = parse_alternative(r.alternative);
  out.method = make_method(r, r.method, measure, alt);
  if (r.compare) parse_method(*r.compare);
  if (r.n1 < 1 || r.n2 < 1) throw std::invalid_argument("n1 and n2 must be >= 1");
  const double beta0 = r.beta0.value_or(equality_value(measure));
  validate_beta0(measure, beta0);
  out.hyp = {measure, beta0, alt};
  if (!(r.level > 0.0 && r.level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  if (!(r.alpha >= 0.0 && r.alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
  if (r.berger_boos && !(*r.berger_boos > 0.0 && *r.berger_boos < 1.0))
    throw std::invalid_argument("Berger-Boos gamma must lie in (0, 1)");
  if (r.beta_grid_points < 3 || r.sup_grid_points < 3 || r.diagnose_grid_points < 3 || r.sweep_points < 2)
    throw std::invalid_argument("grid sizes must be at least 3 (sweep at least 2)");
  const bool needs_table = r.command == Command::test || r.command == Command::ci || r.command == Command::region ||
                           r.command == Command::diagnose;
  if (needs_table) {
    if (!r.x1 || !r.x2) throw std::invalid_argument("--x1 and --x2 are required for this command");
    TwoByTwoData d{*r.x1, r.n1, *r.x2, r.n2};
    d.validate();
    out.data = d;
  }
  if (r.command == Command::power && !(r.theta1 >= 0.0 && r.theta1 <= 1.0 && r.theta2 >= 0.0 && r.theta2 <= 1.0))
    throw std::invalid_argument("theta1 and theta2 must lie in [0, 1]");
  return out;
}

Json header(const RequestSpec& r, const Resolved& v) {
  Json j;
  j["command"] = std::string(to_string(r.command));
  j["method"] = v.method.name();
  j["measure"] = std::string(to_string(v.hyp.measure));
  j["alternative"] = std::string(to_string(v.hyp.alternative));
  j["beta0"] = num(v.hyp.beta0);
  if (v.data) j["data"] = {{"x1", v.data->x1}, {"n1", v.data->n1}, {"x2", v.data->x2}, {"n2", v.data->n2}};
  else j["data"] = {{"n1", r.n1}, {"n2", r.n2}};
  return j;
}

Json do_test(const RequestSpec& r, const Resolved& v) {
  Json j = header(r, v);
  const auto& d = *v.data;
  const auto& m = v.method;
  const auto& h = v.hyp;
  const double pl = method_pvalue(m, d, {h.measure, h.beta0, Alternative::less});
  const double pg = method_pvalue(m, d, {h.measure, h.beta0, Alternative::greater});
  const Alternative two = m.minlike() ? Alternative::two_sided_minlike : Alternative::two_sided_central;
  const double pt = method_pvalue(m, d, {h.measure, h.beta0, two});
  const double p = h.alternative == Alternative::less      ? pl
                   : h.alternative == Alternative::greater ? pg
                                                           : method_pvalue(m, d, h);
  j["estimate"] = num(sample_estimate(d, h.measure));
  j["p_value"] = num(p);
  j["p_less"] = num(pl);
  j["p_greater"] = num(pg);
  j["p_two_sided"] = num(pt);
  return j;
}

Json do_ci(const RequestSpec& r, const Resolved& v) {
  Json j = header(r, v);
  const auto mi = method_ci(v.method, *v.data, r.level);
  j["estimate"] = num(sample_estimate(*v.data, v.hyp.measure));
  j["ci"] = ci_json(mi.ci);
  j["coherent"] = mi.coherent;
  return j;
}

ConfidenceRegion region_of(const RequestSpec& r, const Resolved& v) {
  const auto mi = method_ci(v.method, *v.data, r.level);
  if (mi.region) return *mi.region;
  ConfidenceRegion reg;
  reg.level = r.level;
  reg.intervals = {{mi.ci.lower, mi.ci.upper}};
  return reg;
}

Json do_region(const RequestSpec& r, const Resolved& v) {
  Json j = header(r, v);
  const auto reg = region_of(r, v);
  j["region"] = region_json(reg);
  j["matching_ci"] = ci_json(matching_ci(reg));
  return j;
}

Json do_diagnose(const RequestSpec& r, const Resolved& v) {
  Json j = header(r, v);
  const auto& d = *v.data;
  const auto& m = v.method;
  const auto res = infer(m, d, v.hyp, r.level);
  j["estimate"] = num(res.estimate);
  j["estimate_clamped"] = res.estimate_clamped;
  j["ci"] = ci_json(res.ci);
  if (res.region) j["region"] = region_json(*res.region);
  j["p_value"] = num(res.p_value);
  j["p_less"] = num(res.p_less);
  j["p_greater"] = num(res.p_greater);
  j["p_two_sided"] = num(res.p_two_sided);
  const auto dec = three_decision(res, 1.0 - r.level);
  j["decision"] = {{"outcome", std::string(to_string(dec.decision))}, {"alpha", num(dec.alpha)}};

  const auto grid = beta_grid(m.measure, r.diagnose_grid_points);
  const auto comp = check_compatibility(m, d, {0.01, 0.05, 0.1}, grid);
  Json cv = Json::array();
  for (const auto& x : comp.violations)
    cv.push_back({{"alpha", num(x.alpha)}, {"beta0", num(x.beta0)}, {"p", num(x.p)}, {"rejects", x.rejects},
                  {"in_ci", x.in_ci}});
  j["compatibility"] = {{"compatible", comp.compatible}, {"violations", cv}};

  const auto nest = check_nestedness(m, d, {0.8, 0.9, 0.95, 0.99});
  Json nv = Json::array();
  for (const auto& x : nest.violations)
    nv.push_back({{"level_small", num(x.level_small)}, {"level_large", num(x.level_large)}});
  j["nestedness"] = {{"nested", nest.nested}, {"violations", nv}};

  Json coh;
  for (Alternative a : {Alternative::less, Alternative::greater}) {
    const auto c = check_coherence(pvalue_function(m, d, a), grid, a);
    Json vv = Json::array();
    for (const auto& x : c.violations)
      vv.push_back({{"beta0_a", num(x.beta0_a)}, {"p_a", num(x.p_a)}, {"beta0_b", num(x.beta0_b)}, {"p_b", num(x.p_b)}});
    coh[std::string(to_string(a))] = {{"coherent", c.coherent}, {"violations", vv}};
  }
  j["coherence"] = coh;
  return j;
}

Json do_power(const RequestSpec& r, const Resolved& v) {
  Json j = header(r, v);
  j["alpha"] = num(r.alpha);
  j["theta1"] = num(r.theta1);
  j["theta2"] = num(r.theta2);
  j["power"] = num(exact_power(v.method, r.n1, r.n2, r.theta1, r.theta2, r.alpha, v.hyp));
  return j;
}

Json do_size(const RequestSpec& r, const Resolved& v) {
  Json j = header(r, v);
  const auto s = exact_size(v.method, r.n1, r.n2, r.alpha, v.hyp);
  j["alpha"] = num(r.alpha);
  j["size"] = num(s.size);
  j["theta1"] = num(s.theta1);
  j["theta2"] = num(s.theta2);
  j["grid_modulus"] = num(s.grid_modulus);
  j["valid"] = s.size <= r.alpha;
  return j;
}

OperatingGrid sweep_grid(const RequestSpec& r, const Resolved& v) {
  GridSpec gs;
  gs.points = r.sweep_points;
  if (r.compare) {
    const auto b = make_method(r, *r.compare, v.hyp.measure, v.hyp.alternative);
    return power_difference(v.method, b, r.n1, r.n2, r.alpha, v.hyp, gs);
  }
  return power_grid(v.method, r.n1, r.n2, r.alpha, v.hyp, gs);
}

Json do_sweep(const RequestSpec& r, const Resolved& v, const OperatingGrid& g) {
  Json j = header(r, v);
  j["quantity"] = g.quantity;
  j["grid_method"] = g.method;
  j["alpha"] = num(r.alpha);
  const auto s = summarize(g, r.band);
  j["summary"] = {{"max", num(s.max)},
                  {"min", num(s.min)},
                  {"band", num(s.band)},
                  {"fraction_within", num(s.fraction_within)},
                  {"fraction_above", num(s.fraction_above)},
                  {"fraction_below", num(s.fraction_below)}};
  Json t1 = Json::array();
  Json t2 = Json::array();
  for (double t : g.theta1_grid) t1.push_back(num(t));
  for (double t : g.theta2_grid) t2.push_back(num(t));
  j["theta1_grid"] = t1;
  j["theta2_grid"] = t2;
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < g.values.cols(); ++k) row.push_back(num(g.values(i, k)));
    rows.push_back(row);
  }
  j["values"] = rows;
  return j;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::test: return "test";
    case Command::ci: return "ci";
    case Command::region: return "region";
    case Command::diagnose: return "diagnose";
    case Command::power: return "power";
    case Command::size: return "size";
    case Command::sweep: return "sweep";
  }
  return "";
}

Command parse_command(std::string_view s) {
  for (Command c : {Command::test, Command::ci, Command::region, Command::diagnose, Command::power, Command::size,
                    Command::sweep})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown command '" + std::string(s) + "'");
}

OutputFormat parse_format(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "text") return OutputFormat::text;
  throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected json, csv, text)");
}

RunResult run(const RequestSpec& r) {
  RunResult out;
  Resolved v;
  try {
    v = resolve(r);
  } catch (const std::exception& e) {
    out.status = 2;
    out.error = e.what();
    return out;
  }
  try {
    switch (r.command) {
      case Command::test: out.output = render(do_test(r, v), r.format); break;
      case Command::ci: out.output = render(do_ci(r, v), r.format); break;
      case Command::region: out.output = render(do_region(r, v), r.format); break;
      case Command::diagnose: out.output = render(do_diagnose(r, v), r.format); break;
      case Command::power: out.output = render(do_power(r, v), r.format); break;
      case Command::size: out.output = render(do_size(r, v), r.format); break;
      case Command::sweep: {
        const auto g = sweep_grid(r, v);
        out.output = r.format == OutputFormat::csv ? grid_to_csv(g) : render(do_sweep(r, v, g), r.format);
        break;
      }
    }
  } catch (const ResourceError& e) {
    out.status = 3;
    out.error = e.what();
  } catch (const std::invalid_argument& e) {
    out.status = 2;
    out.error = e.what();
  } catch (const std::domain_error& e) {
    out.status = 2;
    out.error = e.what();
  } catch (const std::exception& e) {
    out.status = 1;
    out.error = e.what();
  }
  return out;
}

}  // namespace twobinom
