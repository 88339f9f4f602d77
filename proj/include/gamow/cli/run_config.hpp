#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamow/decay_analysis.hpp"

namespace gamow::cli {

inline constexpr const char *version = "1.0.0";

/// Bad flags or values; maps to exit code 1.
class UsageError : public Error {
public:
  using Error::Error;
};

enum class Policy { direct, rotated, both, automatic };
enum class Format { csv, json };

std::string to_string(Policy p);
std::string to_string(Format f);

/// "start:stop:points-per-decade" (geometric) or a single time. Values may
/// carry a "tau" suffix, meaning multiples of the first lifetime.
struct TimeGrid {
  std::string text;

  bool empty() const { return text.empty(); }
  std::vector<double> resolve(double tau1) const;
};

struct RunConfig {
  double lambda = 100.0;
  double width = 1.0;
  std::string profile = "box:1";
  TimeGrid times;
  double k_max = 0.0; ///< <= 0 picks a default per command
  Policy policy = Policy::automatic;
  std::string out_dir = ".";
  Format format = Format::csv;

  double direct_abs_tol = 1e-10;
  double rotated_rel_tol = 1e-8;
  double refine_tol = 1e-8;

  /// Checks every value and the module preconditions; throws UsageError.
  void validate() const;

  Well well() const { return {lambda, width}; }
  InitialProfile initial_profile() const;
  CurveOptions curve_options() const;

  nlohmann::ordered_json to_json() const;
  static RunConfig from_json(const nlohmann::ordered_json &j);
};

/// "box:n" or "gauss:centre,width" on a well of the given width.
InitialProfile parse_profile(const std::string &spec, double width);

Policy parse_policy(const std::string &s);
Format parse_format(const std::string &s);

} // namespace gamow::cli
