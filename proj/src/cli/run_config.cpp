#include "gamow/cli/run_config.hpp"

#include <cmath>
#include <sstream>

namespace gamow::cli {

std::string to_string(Policy p) {
  switch (p) {
  case Policy::direct:
    return "direct";
  case Policy::rotated:
    return "rotated";
  case Policy::both:
    return "both";
  case Policy::automatic:
    return "auto";
  }
  return "auto";
}

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

Policy parse_policy(const std::string &s) {
  if (s == "direct")
    return Policy::direct;
  if (s == "rotated")
    return Policy::rotated;
  if (s == "both")
    return Policy::both;
  if (s == "auto")
    return Policy::automatic;
  throw UsageError("unknown policy '" + s + "' (direct|rotated|both|auto)");
}

Format parse_format(const std::string &s) {
  if (s == "csv")
    return Format::csv;
  if (s == "json")
    return Format::json;
  throw UsageError("unknown format '" + s + "' (csv|json)");
}

namespace {

double parse_number(const std::string &s, const std::string &what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception &) {
    throw UsageError("cannot parse " + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v))
    throw UsageError("cannot parse " + what + " '" + s + "'");
  return v;
}

double parse_time(std::string s, double tau1) {
  double scale = 1.0;
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "tau") == 0) {
    s.resize(s.size() - 3);
    scale = tau1;
  }
  return parse_number(s, "time") * scale;
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    parts.push_back(item);
  if (!s.empty() && s.back() == sep)
    parts.emplace_back();
  return parts;
}

} // namespace

std::vector<double> TimeGrid::resolve(double tau1) const {
  if (text.empty())
    throw UsageError("empty time grid");
  const auto parts = split(text, ':');
  if (parts.size() == 1) {
    const double t = parse_time(parts[0], tau1);
    if (t < 0.0)
      throw UsageError("times must be >= 0");
    return {t};
  }
  if (parts.size() != 3)
    throw UsageError("time grid must be start:stop:points-per-decade");
  const double start = parse_time(parts[0], tau1);
  const double stop = parse_time(parts[1], tau1);
  const double ppd = parse_number(parts[2], "points per decade");
  if (!(start > 0.0) || !(stop >= start))
    throw UsageError("time grid needs 0 < start <= stop");
  if (!(ppd >= 1.0) || ppd != std::floor(ppd))
    throw UsageError("points per decade must be a positive integer");
  return geometric_times(start, stop, int(ppd));
}

InitialProfile parse_profile(const std::string &spec, double width) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw UsageError("profile must be box:n or gauss:centre,width");
  const std::string kind = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  try {
    if (kind == "box") {
      const double n = parse_number(args, "box mode");
      if (!(n >= 1.0) || n != std::floor(n))
        throw UsageError("box mode must be a positive integer");
      return InitialProfile::box_mode(int(n), width);
    }
    if (kind == "gauss") {
      const auto parts = split(args, ',');
      if (parts.size() != 2)
        throw UsageError("gauss profile needs centre,width");
      return InitialProfile::truncated_gaussian(parse_number(parts[0], "centre"),
                                                parse_number(parts[1], "width"),
                                                width);
    }
  } catch (const UsageError &) {
    throw;
  } catch (const Error &e) {
    throw UsageError(std::string("invalid profile: ") + e.what());
  }
  throw UsageError("unknown profile kind '" + kind + "'");
}

void RunConfig::validate() const {
  try {
    well().validate();
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
  (void)initial_profile();
  if (!std::isfinite(k_max))
    throw UsageError("kmax must be finite");
  if (out_dir.empty())
    throw UsageError("output directory must not be empty");
  for (double tol : {direct_abs_tol, rotated_rel_tol, refine_tol})
    if (!(tol > 0.0) || !std::isfinite(tol))
      throw UsageError("tolerances must be finite and > 0");
  if (!times.empty())
    (void)times.resolve(1.0); // syntax only; tau units are resolved later
}

InitialProfile RunConfig::initial_profile() const { return parse_profile(profile, width); }

CurveOptions RunConfig::curve_options() const {
  CurveOptions o;
  switch (policy) {
  case Policy::direct:
    o.policy = MethodPolicy::direct;
    break;
  case Policy::rotated:
    o.policy = MethodPolicy::rotated;
    break;
  default:
    o.policy = MethodPolicy::automatic;
  }
  o.k_max = k_max;
  o.refine_tol = refine_tol;
  o.direct.abs_tol = direct_abs_tol;
  o.rotated.rel_tol = rotated_rel_tol;
  return o;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["lambda"] = lambda;
  j["width"] = width;
  j["profile"] = profile;
  j["times"] = times.text;
  j["kmax"] = k_max;
  j["policy"] = to_string(policy);
  j["out"] = out_dir;
  j["format"] = to_string(format);
  j["direct_abs_tol"] = direct_abs_tol;
  j["rotated_rel_tol"] = rotated_rel_tol;
  j["refine_tol"] = refine_tol;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::ordered_json &j) {
  RunConfig c;
  try {
    c.lambda = j.at("lambda").get<double>();
    c.width = j.at("width").get<double>();
    c.profile = j.at("profile").get<std::string>();
    c.times.text = j.at("times").get<std::string>();
    c.k_max = j.at("kmax").get<double>();
    c.policy = parse_policy(j.at("policy").get<std::string>());
    c.out_dir = j.at("out").get<std::string>();
    c.format = parse_format(j.at("format").get<std::string>());
    c.direct_abs_tol = j.at("direct_abs_tol").get<double>();
    c.rotated_rel_tol = j.at("rotated_rel_tol").get<double>();
    c.refine_tol = j.at("refine_tol").get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  return c;
}

} // namespace gamow::cli
