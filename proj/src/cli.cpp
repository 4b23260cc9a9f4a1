#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qeikit/cli.hpp"
#include "qeikit/fock.hpp"
#include "qeikit/qei.hpp"

namespace qeikit::cli {

using nlohmann::json;

namespace {

json quadrature_result(const qei::QeiBound& b) { return json{{"q_value", b.q_value}, {"error", b.quadrature_error}}; }

qei::Target target_from(const json& cfg) {
  if (cfg.contains("mass")) return cfg.at("mass").get<double>();
  return spectrum_from_json(cfg.at("spectrum"));
}

std::vector<double> grid_from(const json& g) {
  return qei::log_grid(g.at("min").get<double>(), g.at("max").get<double>(), g.at("count").get<std::size_t>());
}

json run_scaling(const json& cfg) {
  const auto w = weight_from_json(cfg.at("weight"));
  const auto grid = grid_from(cfg.at("tau"));
  const auto curve = qei::scaling_curve(w, target_from(cfg), grid, cfg.at("tol").get<double>());
  json out{{"tau", curve.tau_values}, {"bound", curve.bound_values}, {"error", curve.errors}};
  if (!cfg.at("fit").is_null()) {
    const std::array<double, 2> window{cfg.at("fit")[0].get<double>(), cfg.at("fit")[1].get<double>()};
    const auto fit = qei::fit_scaling_exponent(curve, window);
    out["fit"] = json{{"window", window}, {"slope", fit.slope}, {"residual", fit.residual}, {"points", fit.points}};
  }
  return out;
}

json run_nuclearity(const json& cfg) {
  const auto s = spectrum_from_json(cfg.at("spectrum"));
  const double r = cfg.at("r").get<double>();
  const double c = cfg.at("c").get<double>();
  const json& beta = cfg.at("beta");
  if (beta.is_number()) {
    const auto est = spectrum::nuclearity_log_index(s, beta.get<double>(), r, c);
    return json{{"log_index_bound", est.log_index_bound},
                {"truncation_error", est.truncation_error},
                {"tail_test", std::string(spectrum::tail_test_name(est.test))}};
  }
  auto grid = grid_from(beta);
  std::reverse(grid.begin(), grid.end());
  const auto fit = spectrum::fit_nuclearity_exponent(s, grid, r, c);
  json out{{"beta", grid}, {"exponent", fit.exponent}, {"residual", fit.residual}};
  std::vector<double> bounds, errors;
  for (const auto& e : fit.estimates) {
    bounds.push_back(e.log_index_bound);
    errors.push_back(e.truncation_error);
  }
  out["log_index_bound"] = bounds;
  out["truncation_error"] = errors;
  return out;
}

json run_fock(const json& cfg) {
  const auto w = weight_from_json(cfg.at("weight"));
  const double m = cfg.at("mass").get<double>();
  const auto modes = fock::build_mode_set(cfg.at("L").get<double>(), cfg.at("Lambda").get<double>(), m,
                                          cfg.at("ir_floor").get<double>());
  const auto sector = cfg.at("sector") == "0+2+4" ? fock::Sector::two_and_four : fock::Sector::two;
  const auto form = fock::assemble_smeared_energy_form(modes, w, sector);
  const auto eig = fock::min_eigenvalue(form);
  const auto bound = qei::worldline_qwei_bound(w, m);
  const auto report = fock::verify_qwei(form, eig, bound, cfg.at("epsilon").get<double>());
  return json{{"lambda_min", report.lambda_min},
              {"q_value", report.q_value},
              {"ratio", report.ratio},
              {"pass", report.pass},
              {"dimension", report.dimension},
              {"modes", modes.size()},
              {"hermiticity_defect", fock::hermiticity_defect(form)},
              {"eigen_residual", eig.residual},
              {"solver", eig.iterative ? "lanczos" : "dense"}};
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

// Flag value as JSON: numbers and objects parse, anything else stays a string
// so that validation can name the field.
json flag_value(const std::string& text) {
  if (!text.empty() && (text.front() == '{' || text.front() == '[')) {
    try {
      return json::parse(text);
    } catch (const json::parse_error&) {
      return text;
    }
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  return text;
}

struct Options {
  std::optional<std::string> config_path, out_path, csv_path;
  std::map<std::string, std::string> fields;  // config key -> raw flag text
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError({"out: cannot open '" + path + "' for writing"});
  f << text;
}

}  // namespace

json execute(std::string_view command, const json& cfg) {
  const std::string cmd(command);
  if (cmd == "bound") {
    const auto w = weight_from_json(cfg.at("weight"));
    return quadrature_result(qei::worldline_qwei_bound(w, cfg.at("mass").get<double>(), cfg.at("tol").get<double>()));
  }
  if (cmd == "gff") {
    const auto w = weight_from_json(cfg.at("weight"));
    return quadrature_result(
        qei::gff_qwei_bound(w, spectrum_from_json(cfg.at("spectrum")), cfg.at("tol").get<double>()));
  }
  if (cmd == "vacuum-bound") {
    const auto w = weight_from_json(cfg.at("weight"));
    const double m = cfg.at("mass").get<double>();
    const auto v = qei::vacuum_reference_bound(w, m, cfg.at("tol").get<double>());
    const auto q = qei::worldline_qwei_bound(w, m);
    json out = quadrature_result(v);
    out["worldline_q_value"] = q.q_value;
    out["ratio"] = q.q_value > 0.0 ? v.q_value / q.q_value : 0.0;
    return out;
  }
  if (cmd == "scaling") return run_scaling(cfg);
  if (cmd == "nuclearity") return run_nuclearity(cfg);
  if (cmd == "fock") return run_fock(cfg);
  throw ConfigError({"command: unknown command '" + cmd + "'"});
}

std::string scaling_csv(const json& results) {
  std::string out = "tau,bound,error\n";
  const auto& tau = results.at("tau");
  char line[128];
  for (std::size_t i = 0; i < tau.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", tau[i].get<double>(),
                  results.at("bound")[i].get<double>(), results.at("error")[i].get<double>());
    out += line;
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum energy inequality bounds, scaling fits, nuclearity diagnostics and Fock-space checks."};
  app.name("qeikit");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(kVersion));

  Options opts;
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const std::map<std::string, std::vector<Flag>> table{
      {"bound",
       {{"--weight", "weight", "family name or weight JSON"},
        {"--mass", "mass", "field mass m >= 0"},
        {"--tol", "tol", "relative tolerance"}}},
      {"gff",
       {{"--weight", "weight", "family name or weight JSON"},
        {"--spectrum", "spectrum", "mass spectrum JSON"},
        {"--tol", "tol", "relative tolerance"}}},
      {"vacuum-bound",
       {{"--weight", "weight", "family name or weight JSON"},
        {"--mass", "mass", "field mass m >= 0"},
        {"--tol", "tol", "relative tolerance"}}},
      {"scaling",
       {{"--weight", "weight", "family name or weight JSON"},
        {"--mass", "mass", "field mass m >= 0"},
        {"--spectrum", "spectrum", "mass spectrum JSON (instead of --mass)"},
        {"--tau", "tau", "log grid min:max:count"},
        {"--fit", "fit", "fit window: all or lo:hi"},
        {"--tol", "tol", "relative tolerance"}}},
      {"nuclearity",
       {{"--spectrum", "spectrum", "mass spectrum JSON"},
        {"--beta", "beta", "beta, or a log grid min:max:count for the exponent fit"},
        {"--r", "r", "region radius r"},
        {"--c", "c", "constant c"}}},
      {"fock",
       {{"--L", "L", "box side"},
        {"--Lambda", "Lambda", "momentum cutoff"},
        {"--mass", "mass", "field mass"},
        {"--weight", "weight", "family name or weight JSON"},
        {"--epsilon", "epsilon", "pass tolerance epsilon"},
        {"--sector", "sector", "0+2 or 0+2+4"},
        {"--ir-floor", "ir_floor", "exclude |k| below this"}}},
  };
  const std::map<std::string, std::string> blurbs{
      {"bound", "worldline QWEI bound for a single mass"},
      {"gff", "QWEI bound for a generalised free field"},
      {"vacuum-bound", "bound from the point-split sum-of-squares route"},
      {"scaling", "bound over a tau grid with a log-log exponent fit"},
      {"nuclearity", "log nuclearity-index estimate and its beta exponent"},
      {"fock", "smeared energy form in a box and its lowest eigenvalue"},
  };

  std::map<std::string, CLI::App*> subs;
  for (auto name : commands()) {
    const std::string n(name);
    CLI::App* sub = app.add_subcommand(n, blurbs.at(n));
    subs[n] = sub;
    sub->add_option_function<std::string>(
        "--config", [&opts](const std::string& v) { opts.config_path = v; }, "JSON config file");
    sub->add_option_function<std::string>(
        "--out", [&opts](const std::string& v) { opts.out_path = v; }, "write the JSON record here");
    if (n == "scaling") {
      sub->add_option_function<std::string>(
          "--csv", [&opts](const std::string& v) { opts.csv_path = v; }, "write the curve CSV here");
    }
    for (const auto& f : table.at(n)) {
      const std::string key = f.key;
      sub->add_option_function<std::string>(
          f.name, [&opts, key](const std::string& v) { opts.fields[key] = v; }, f.help);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }

  const auto started = std::chrono::steady_clock::now();
  json record{{"command", command}, {"tool_version", std::string(kVersion)}};
  int code = 0;
  json config;
  try {
    json raw = json::object();
    if (opts.config_path) {
      std::ifstream f(*opts.config_path);
      if (!f) throw ConfigError({"config: cannot read '" + *opts.config_path + "'"});
      try {
        raw = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError({"config: not valid JSON (" + std::string(e.what()) + ")"});
      }
    }
    if (!raw.is_object()) throw ConfigError({"config: top level must be a JSON object"});
    for (const auto& [key, text] : opts.fields) raw[key] = flag_value(text);
    config = validate_config(command, raw);
    record["config"] = config;
    record["results"] = execute(command, config);
  } catch (const ConfigError& e) {
    err << "config error:\n";
    for (const auto& issue : e.issues()) err << "  " << issue << "\n";
    return 1;
  } catch (const DivergenceDetected& e) {
    code = 2;
    record["error"] = json{{"type", "DivergenceDetected"}, {"message", e.what()}};
  } catch (const NonConvergence& e) {
    code = 3;
    record["error"] = json{{"type", "NonConvergence"}, {"message", e.what()}};
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (code != 0) err << record["error"]["type"].get<std::string>() << ": " << record["error"]["message"].get<std::string>() << "\n";

  // Timing lives apart from the payload so reruns compare equal without it.
  record["metadata"] = json{
      {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()},
      {"started_at", utc_now()}};
  if (config.is_object() && config.contains("weight") && config["weight"].value("family", "") == "gaussian") {
    record["metadata"]["weight_note"] = "Schwartz-class, outside the compactly-supported hypothesis";
  }

  const std::string text = record.dump(2) + "\n";
  try {
    const bool csv_to_stdout = command == "scaling" && !opts.csv_path && code == 0;
    if (command == "scaling" && code == 0) {
      const std::string csv = scaling_csv(record["results"]);
      if (opts.csv_path) {
        write_text(*opts.csv_path, csv);
      } else {
        out << csv;
      }
    }
    if (opts.out_path) {
      write_text(*opts.out_path, text);
    } else if (!csv_to_stdout) {
      out << text;
    }
  } catch (const ConfigError& e) {
    err << "config error:\n  " << e.issues().front() << "\n";
    return 1;
  }
  return code;
}

}  // namespace qeikit::cli
