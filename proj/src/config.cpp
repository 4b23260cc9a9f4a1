#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "qeikit/cli.hpp"

namespace qeikit::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kFamilies{"gaussian", "bump", "cos2", "samples"};
const std::vector<std::string> kSpectrumKinds{"list", "arithmetic", "power_law", "logarithmic"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Collects issues while walking a config.
class Checker {
 public:
  void fail(const std::string& path, const std::string& message) { issues_.push_back(path + ": " + message); }
  bool ok() const { return issues_.empty(); }
  std::vector<std::string> take() { return std::move(issues_); }

  void unknown_keys(const json& obj, const std::string& path, const std::vector<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(child(path, key), "unknown field (allowed: " + join(allowed) + ")");
      }
    }
  }

  // Finite number, optionally required positive or non-negative.
  std::optional<double> number(const json& obj, const std::string& key, const std::string& path, bool required,
                               std::optional<double> fallback, const char* sign = nullptr) {
    const std::string p = child(path, key);
    if (!obj.contains(key) || obj.at(key).is_null()) {
      if (required) fail(p, "required field is missing");
      return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(p, "must be a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      fail(p, "must be finite");
      return std::nullopt;
    }
    if (sign != nullptr && std::string(sign) == "positive" && !(x > 0.0)) {
      fail(p, "must be > 0");
      return std::nullopt;
    }
    if (sign != nullptr && std::string(sign) == "nonnegative" && !(x >= 0.0)) {
      fail(p, "must be >= 0");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::vector<double>> number_list(const json& obj, const std::string& key, const std::string& path) {
    const std::string p = child(path, key);
    if (!obj.contains(key)) {
      fail(p, "required field is missing");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_array()) {
      fail(p, "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(p + "[" + std::to_string(i) + "]", "must be a finite number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  std::vector<std::string> issues_;
};

// "lo:hi" or "lo:hi:count" with positive entries.
std::optional<std::vector<double>> split_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return parts;
}

json normalize_weight(const json& raw, const std::string& path, Checker& c) {
  json w = raw;
  if (raw.is_null()) w = "gaussian";
  if (w.is_string()) w = json{{"family", w.get<std::string>()}};
  if (!w.is_object()) {
    c.fail(path, "must be a family name or an object {family, params, tau}");
    return {};
  }
  c.unknown_keys(w, path, {"family", "params", "tau"});
  json out;
  if (!w.contains("family") || !w.at("family").is_string()) {
    c.fail(child(path, "family"), "required string (one of: " + join(kFamilies) + ")");
    return {};
  }
  const std::string family = w.at("family").get<std::string>();
  if (std::find(kFamilies.begin(), kFamilies.end(), family) == kFamilies.end()) {
    c.fail(child(path, "family"), "unknown weight family '" + family + "' (allowed: " + join(kFamilies) + ")");
    return {};
  }
  out["family"] = family;
  const std::string ppath = child(path, "params");
  json params = w.value("params", json::object());
  if (!params.is_object()) {
    c.fail(ppath, "must be an object");
    return {};
  }
  json p;
  if (family == "samples") {
    c.unknown_keys(params, ppath, {"t", "g", "decay_floor"});
    const auto t = c.number_list(params, "t", ppath);
    const auto g = c.number_list(params, "g", ppath);
    const auto q = c.number(params, "decay_floor", ppath, true, std::nullopt, "positive");
    if (t && g) {
      if (t->size() != g->size()) c.fail(ppath, "t and g must have the same length");
      if (t->size() < 2) c.fail(child(ppath, "t"), "need at least two samples");
      for (std::size_t i = 1; i < t->size(); ++i) {
        if (!((*t)[i] > (*t)[i - 1])) {
          c.fail(child(ppath, "t"), "must be strictly increasing");
          break;
        }
      }
      p["t"] = *t;
      p["g"] = *g;
    }
    if (q) p["decay_floor"] = *q;
  } else {
    c.unknown_keys(params, ppath, {"width", "center"});
    if (auto width = c.number(params, "width", ppath, false, 1.0, "positive")) p["width"] = *width;
    if (auto center = c.number(params, "center", ppath, false, 0.0)) p["center"] = *center;
  }
  out["params"] = p;
  if (auto tau = c.number(w, "tau", path, false, 1.0, "positive")) out["tau"] = *tau;
  return out;
}

json normalize_spectrum(const json& raw, const std::string& path, Checker& c) {
  if (raw.is_null()) {
    c.fail(path, "required field is missing");
    return {};
  }
  if (!raw.is_object()) {
    c.fail(path, "must be an object {kind, ...}");
    return {};
  }
  if (!raw.contains("kind") || !raw.at("kind").is_string()) {
    c.fail(child(path, "kind"), "required string (one of: " + join(kSpectrumKinds) + ")");
    return {};
  }
  const std::string kind = raw.at("kind").get<std::string>();
  json out{{"kind", kind}};
  if (kind == "list") {
    c.unknown_keys(raw, path, {"kind", "masses"});
    if (auto masses = c.number_list(raw, "masses", path)) {
      for (std::size_t i = 0; i < masses->size(); ++i) {
        if (!((*masses)[i] > 0.0)) c.fail(child(path, "masses") + "[" + std::to_string(i) + "]", "must be > 0");
      }
      std::sort(masses->begin(), masses->end());
      out["masses"] = *masses;
    }
  } else if (kind == "arithmetic" || kind == "logarithmic") {
    c.unknown_keys(raw, path, {"kind", "m0"});
    if (auto m0 = c.number(raw, "m0", path, false, 1.0, "positive")) out["m0"] = *m0;
  } else if (kind == "power_law") {
    c.unknown_keys(raw, path, {"kind", "c", "p"});
    if (auto cc = c.number(raw, "c", path, false, 1.0, "positive")) out["c"] = *cc;
    if (auto p = c.number(raw, "p", path, true, std::nullopt, "positive")) out["p"] = *p;
  } else {
    c.fail(child(path, "kind"), "unknown spectrum kind '" + kind + "' (allowed: " + join(kSpectrumKinds) + ")");
  }
  return out;
}

// Log grid as "min:max:count" or {min, max, count}.
json normalize_grid(const json& raw, const std::string& path, Checker& c) {
  double lo = 0.0, hi = 0.0, count = 0.0;
  if (raw.is_string()) {
    const auto parts = split_range(raw.get<std::string>());
    if (!parts || parts->size() != 3) {
      c.fail(path, "expected min:max:count");
      return {};
    }
    lo = (*parts)[0];
    hi = (*parts)[1];
    count = (*parts)[2];
  } else if (raw.is_object()) {
    c.unknown_keys(raw, path, {"min", "max", "count"});
    const auto a = c.number(raw, "min", path, true, std::nullopt);
    const auto b = c.number(raw, "max", path, true, std::nullopt);
    const auto n = c.number(raw, "count", path, true, std::nullopt);
    if (!a || !b || !n) return {};
    lo = *a;
    hi = *b;
    count = *n;
  } else if (raw.is_number()) {
    lo = hi = raw.get<double>();
    count = 1.0;
  } else {
    c.fail(path, raw.is_null() ? "required field is missing" : "expected min:max:count");
    return {};
  }
  bool good = true;
  if (!(lo > 0.0) || !(hi > 0.0)) {
    c.fail(path, "values must be > 0");
    good = false;
  }
  if (good && !(hi >= lo)) {
    c.fail(path, "max must be >= min");
    good = false;
  }
  if (!(count >= 1.0) || count != std::floor(count) || count > 1e6) {
    c.fail(path, "count must be a positive integer");
    good = false;
  }
  if (!good) return {};
  return json{{"min", lo}, {"max", hi}, {"count", static_cast<int>(count)}};
}

json normalize_fit(const json& raw, const json& grid, const std::string& path, Checker& c) {
  if (raw.is_null()) return nullptr;
  if (raw.is_string() && raw.get<std::string>() == "all") {
    if (grid.is_null()) return nullptr;
    return json::array({grid.at("min"), grid.at("max")});
  }
  std::optional<std::vector<double>> parts;
  if (raw.is_string()) {
    parts = split_range(raw.get<std::string>());
  } else if (raw.is_array() && raw.size() == 2 && raw[0].is_number() && raw[1].is_number()) {
    parts = std::vector<double>{raw[0].get<double>(), raw[1].get<double>()};
  }
  if (!parts || parts->size() != 2 || !((*parts)[0] > 0.0) || !((*parts)[1] >= (*parts)[0])) {
    c.fail(path, "expected 'all' or lo:hi with 0 < lo <= hi");
    return nullptr;
  }
  return json::array({(*parts)[0], (*parts)[1]});
}

json normalize_beta(const json& raw, const std::string& path, Checker& c) {
  if (raw.is_number()) {
    const double b = raw.get<double>();
    if (!(b > 0.0) || !std::isfinite(b)) {
      c.fail(path, "must be > 0");
      return {};
    }
    return b;
  }
  return normalize_grid(raw, path, c);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error("invalid configuration: " + join(issues)), issues_(std::move(issues)) {}

std::vector<std::string_view> commands() { return {"bound", "gff", "vacuum-bound", "scaling", "nuclearity", "fock"}; }

json validate_config(std::string_view command, const json& raw) {
  Checker c;
  if (!raw.is_object()) throw ConfigError({"(root): config must be a JSON object"});
  json out;
  const std::string cmd(command);

  if (cmd == "bound" || cmd == "vacuum-bound") {
    c.unknown_keys(raw, "", {"weight", "mass", "tol"});
    out["weight"] = normalize_weight(raw.value("weight", json()), "weight", c);
    if (auto m = c.number(raw, "mass", "", true, std::nullopt, "nonnegative")) out["mass"] = *m;
    if (auto t = c.number(raw, "tol", "", false, cmd == "bound" ? 1e-10 : 1e-8, "positive")) out["tol"] = *t;
  } else if (cmd == "gff") {
    c.unknown_keys(raw, "", {"weight", "spectrum", "tol"});
    out["weight"] = normalize_weight(raw.value("weight", json()), "weight", c);
    out["spectrum"] = normalize_spectrum(raw.value("spectrum", json()), "spectrum", c);
    if (auto t = c.number(raw, "tol", "", false, 1e-10, "positive")) out["tol"] = *t;
  } else if (cmd == "scaling") {
    c.unknown_keys(raw, "", {"weight", "mass", "spectrum", "tau", "fit", "tol"});
    out["weight"] = normalize_weight(raw.value("weight", json()), "weight", c);
    const bool has_mass = raw.contains("mass") && !raw.at("mass").is_null();
    const bool has_spectrum = raw.contains("spectrum") && !raw.at("spectrum").is_null();
    if (has_mass == has_spectrum) {
      c.fail("mass", "give exactly one of mass or spectrum");
    } else if (has_mass) {
      if (auto m = c.number(raw, "mass", "", true, std::nullopt, "nonnegative")) out["mass"] = *m;
    } else {
      out["spectrum"] = normalize_spectrum(raw.at("spectrum"), "spectrum", c);
    }
    out["tau"] = normalize_grid(raw.value("tau", json()), "tau", c);
    out["fit"] = normalize_fit(raw.value("fit", json()), out["tau"], "fit", c);
    if (auto t = c.number(raw, "tol", "", false, 1e-10, "positive")) out["tol"] = *t;
  } else if (cmd == "nuclearity") {
    c.unknown_keys(raw, "", {"spectrum", "beta", "r", "c"});
    out["spectrum"] = normalize_spectrum(raw.value("spectrum", json()), "spectrum", c);
    out["beta"] = normalize_beta(raw.value("beta", json()), "beta", c);
    if (auto r = c.number(raw, "r", "", false, 1.0, "positive")) out["r"] = *r;
    if (auto cc = c.number(raw, "c", "", false, 1.0, "positive")) out["c"] = *cc;
  } else if (cmd == "fock") {
    c.unknown_keys(raw, "", {"L", "Lambda", "mass", "weight", "epsilon", "sector", "ir_floor"});
    if (auto L = c.number(raw, "L", "", true, std::nullopt, "positive")) out["L"] = *L;
    if (auto lam = c.number(raw, "Lambda", "", true, std::nullopt, "positive")) out["Lambda"] = *lam;
    if (auto m = c.number(raw, "mass", "", true, std::nullopt, "nonnegative")) out["mass"] = *m;
    out["weight"] = normalize_weight(raw.value("weight", json()), "weight", c);
    if (auto e = c.number(raw, "epsilon", "", false, 0.25, "nonnegative")) out["epsilon"] = *e;
    if (auto f = c.number(raw, "ir_floor", "", false, 0.0, "nonnegative")) out["ir_floor"] = *f;
    const json sector = raw.value("sector", json("0+2"));
    if (!sector.is_string() || (sector != "0+2" && sector != "0+2+4")) {
      c.fail("sector", "must be \"0+2\" or \"0+2+4\"");
    } else {
      out["sector"] = sector;
    }
  } else {
    std::vector<std::string> names;
    for (auto n : commands()) names.emplace_back(n);
    throw ConfigError({"command: unknown command '" + cmd + "' (allowed: " + join(names) + ")"});
  }

  if (!c.ok()) throw ConfigError(c.take());
  return out;
}

weights::Weight weight_from_json(const json& w) {
  const std::string family = w.at("family").get<std::string>();
  const json& p = w.at("params");
  weights::Weight base = weights::Weight::gaussian();
  if (family == "samples") {
    base = weights::Weight::raw_samples(p.at("t").get<std::vector<double>>(), p.at("g").get<std::vector<double>>(),
                                        p.at("decay_floor").get<double>());
  } else {
    const double width = p.at("width").get<double>();
    const double center = p.at("center").get<double>();
    if (family == "gaussian") base = weights::Weight::gaussian(width, center);
    if (family == "bump") base = weights::Weight::bump(width, center);
    if (family == "cos2") base = weights::Weight::cos2_window(width, center);
  }
  const double tau = w.at("tau").get<double>();
  return tau == 1.0 ? base : weights::rescale(base, tau);
}

spectrum::MassSpectrum spectrum_from_json(const json& s) {
  const std::string kind = s.at("kind").get<std::string>();
  if (kind == "list") return spectrum::MassSpectrum::list(s.at("masses").get<std::vector<double>>());
  if (kind == "arithmetic") return spectrum::MassSpectrum::arithmetic(s.at("m0").get<double>());
  if (kind == "logarithmic") return spectrum::MassSpectrum::logarithmic(s.at("m0").get<double>());
  return spectrum::MassSpectrum::power_law(s.at("c").get<double>(), s.at("p").get<double>());
}

}  // namespace qeikit::cli
