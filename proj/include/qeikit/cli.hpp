#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qeikit/errors.hpp"
#include "qeikit/spectrum.hpp"
#include "qeikit/weights.hpp"

namespace qeikit::cli {

inline constexpr std::string_view kVersion = "0.1.0";

// Commands: bound, gff, vacuum-bound, scaling, nuclearity, fock.
std::vector<std::string_view> commands();

// Itemized schema errors, each "path: message".
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Checks `raw` against the schema of `command`, fills defaults and returns the
// normalized config. Throws ConfigError listing every problem found.
nlohmann::json validate_config(std::string_view command, const nlohmann::json& raw);

// Builders for normalized sub-configs.
weights::Weight weight_from_json(const nlohmann::json& normalized);
spectrum::MassSpectrum spectrum_from_json(const nlohmann::json& normalized);

// Runs a validated config and returns the results payload.
nlohmann::json execute(std::string_view command, const nlohmann::json& config);

// Full command line, argv[0] excluded. Returns the process exit code:
// 0 ok, 1 config or usage error, 2 divergence, 3 non-convergence.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Scaling curve as CSV: header tau,bound,error and 17 significant digits.
std::string scaling_csv(const nlohmann::json& results);

}  // namespace qeikit::cli
