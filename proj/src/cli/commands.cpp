#include "gamow/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "gamow/gamow_expansion.hpp"
#include "gamow/potential_model.hpp"

namespace gamow::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string &path, const std::string &content) {
  const fs::path target(path);
  if (target.has_parent_path())
    fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out)
      throw Error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

int exit_code(const std::exception &e) {
  if (dynamic_cast<const CountMismatch *>(&e) || dynamic_cast<const ResidueMismatch *>(&e))
    return 2;
  if (dynamic_cast<const QuadratureNotConverged *>(&e) || dynamic_cast<const NoConvergence *>(&e))
    return 3;
  return 1;
}

namespace {

std::string out_path(const RunConfig &c, const std::string &name) {
  return (fs::path(c.out_dir) / name).string();
}

std::string csv_preamble(const RunConfig &c) {
  return "# gamow_lab " + std::string(version) + "\n# config " + c.to_json().dump() + "\n";
}

ojson json_envelope(const RunConfig &c, const std::string &command) {
  ojson j;
  j["version"] = version;
  j["command"] = command;
  j["config"] = c.to_json();
  return j;
}

std::string json_text(const ojson &j) { return j.dump(2) + "\n"; }

// JSON has no NaN; missing values become null.
ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

class CsvWriter {
public:
  explicit CsvWriter(std::string preamble) : text_(std::move(preamble)) {}

  void header(std::initializer_list<const char *> names) {
    bool first = true;
    for (const char *n : names) {
      text_ += first ? "" : ",";
      text_ += n;
      first = false;
    }
    text_ += "\n";
  }

  CsvWriter &cell(double v) { return raw(format_number(v)); }
  CsvWriter &cell(const std::string &s) { return raw(s); }
  CsvWriter &cell(int v) { return raw(std::to_string(v)); }
  void end() {
    text_ += "\n";
    fresh_ = true;
  }

  const std::string &text() const { return text_; }

private:
  CsvWriter &raw(const std::string &s) {
    if (!fresh_)
      text_ += ",";
    text_ += s;
    fresh_ = false;
    return *this;
  }

  std::string text_;
  bool fresh_ = true;
};

double checked_first_lifetime(const Well &w) {
  const auto poles = enumerate_poles(w, 1.5 * std::numbers::pi / w.width);
  if (poles.empty())
    throw UsageError("'tau' times need a resonance below k a = 1.5 pi");
  return poles.front().lifetime();
}

std::vector<double> resolve_times(const RunConfig &c) {
  if (c.times.empty())
    throw UsageError("this command needs --times");
  const bool uses_tau = c.times.text.find("tau") != std::string::npos;
  return c.times.resolve(uses_tau ? checked_first_lifetime(c.well()) : 1.0);
}

struct PoleRow {
  Resonance r;
  double seed_deviation = std::nan("");
  std::string warning;
};

std::vector<PoleRow> pole_rows(const RunConfig &c) {
  const Well w = c.well();
  const double k_max = c.k_max > 0.0 ? c.k_max : 16.0 / w.width;
  std::vector<PoleRow> rows;
  for (const auto &r : enumerate_poles(w, k_max)) {
    PoleRow row{r, std::nan(""), ""};
    try {
      const auto seed = asymptotic_pole_seed(r.index, w).value();
      row.seed_deviation = std::abs(r.k.value() - seed) / std::abs(seed);
    } catch (const SeedOutOfRegime &) {
    }
    if (!w.metastable())
      row.warning = "non-metastable";
    else if (!in_rotation_sector(r.k.value()))
      row.warning = "outside rotation sector";
    rows.push_back(row);
  }
  return rows;
}

} // namespace

CommandResult cmd_poles(const RunConfig &c) {
  c.validate();
  const auto rows = pole_rows(c);
  const double a = c.width;
  CommandResult res;
  std::string path;
  if (c.format == Format::csv) {
    CsvWriter csv(csv_preamble(c));
    csv.header({"n", "re_ka", "im_ka", "re_E", "gamma", "tau", "residual",
                "seed_deviation", "warning"});
    for (const auto &row : rows) {
      const auto &r = row.r;
      csv.cell(r.index).cell(r.k.real() * a).cell(r.k.imag() * a).cell(r.energy().real())
          .cell(r.width()).cell(r.lifetime()).cell(r.residual).cell(row.seed_deviation)
          .cell(row.warning);
      csv.end();
    }
    path = out_path(c, "poles.csv");
    write_atomic(path, csv.text());
  } else {
    ojson j = json_envelope(c, "poles");
    ojson list = ojson::array();
    for (const auto &row : rows) {
      const auto &r = row.r;
      ojson e;
      e["n"] = r.index;
      e["re_ka"] = r.k.real() * a;
      e["im_ka"] = r.k.imag() * a;
      e["re_E"] = r.energy().real();
      e["gamma"] = r.width();
      e["tau"] = r.lifetime();
      e["residual"] = r.residual;
      e["seed_deviation"] = number(row.seed_deviation);
      e["warning"] = row.warning;
      list.push_back(e);
    }
    j["poles"] = list;
    path = out_path(c, "poles.json");
    write_atomic(path, json_text(j));
  }
  res.files.push_back(path);
  res.summary = std::to_string(rows.size()) + " poles written to " + path;
  return res;
}

namespace {

struct Snapshot {
  double t = 0.0;
  std::vector<WaveState> states;
  double discrepancy = std::nan("");
};

Snapshot snapshot(const RunConfig &c, double t, const Eigen::VectorXd &grid) {
  const Well w = c.well();
  const InitialProfile p = c.initial_profile();
  const CurveOptions o = c.curve_options();
  Snapshot s;
  s.t = t;
  if (t == 0.0) {
    s.states.push_back(initial_state(p, grid));
    if (c.policy == Policy::both)
      s.discrepancy = 0.0;
    return s;
  }
  auto direct = [&] { return evolve_direct(p, t, grid, w, o.direct); };
  auto rotated = [&] { return evolve_rotated(p, t, grid, w, c.k_max, o.rotated).total; };
  switch (c.policy) {
  case Policy::direct:
    s.states.push_back(direct());
    break;
  case Policy::rotated:
    s.states.push_back(rotated());
    break;
  case Policy::automatic:
    s.states.push_back(t < o.direct_below * w.width * w.width ? direct() : rotated());
    break;
  case Policy::both:
    s.states.push_back(direct());
    s.states.push_back(rotated());
    s.discrepancy = (s.states[0].psi - s.states[1].psi).cwiseAbs().maxCoeff();
    break;
  }
  return s;
}

} // namespace

CommandResult cmd_evolve(const RunConfig &c) {
  c.validate();
  const auto times = resolve_times(c);
  const Eigen::VectorXd grid = well_grid(c.well(), 257);
  std::vector<Snapshot> snaps;
  for (double t : times)
    snaps.push_back(snapshot(c, t, grid));

  CommandResult res;
  std::ostringstream summary;
  if (c.format == Format::csv) {
    CsvWriter index(csv_preamble(c));
    index.header({"snapshot", "t", "methods", "norm_inside", "discrepancy", "file"});
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      const auto &s = snaps[i];
      char name[32];
      std::snprintf(name, sizeof name, "evolve_%03zu.csv", i);
      CsvWriter csv(csv_preamble(c) + "# t " + format_number(s.t) + "\n");
      csv.header({"x", "re_psi", "im_psi", "abs2", "method"});
      std::string methods;
      for (const auto &ws : s.states) {
        methods += (methods.empty() ? "" : "+") + to_string(ws.method);
        for (Eigen::Index k = 0; k < ws.x.size(); ++k) {
          csv.cell(ws.x(k)).cell(ws.psi(k).real()).cell(ws.psi(k).imag())
              .cell(std::norm(ws.psi(k))).cell(to_string(ws.method));
          csv.end();
        }
      }
      const std::string path = out_path(c, name);
      write_atomic(path, csv.text());
      res.files.push_back(path);
      index.cell(int(i)).cell(s.t).cell(methods).cell(norm_inside(s.states[0], c.well()))
          .cell(s.discrepancy).cell(std::string(name));
      index.end();
    }
    const std::string path = out_path(c, "evolve.csv");
    write_atomic(path, index.text());
    res.files.insert(res.files.begin(), path);
  } else {
    ojson j = json_envelope(c, "evolve");
    ojson list = ojson::array();
    for (const auto &s : snaps) {
      ojson e;
      e["t"] = s.t;
      e["discrepancy"] = number(s.discrepancy);
      e["norm_inside"] = norm_inside(s.states[0], c.well());
      ojson states = ojson::array();
      for (const auto &ws : s.states) {
        ojson st;
        st["method"] = to_string(ws.method);
        std::vector<double> x(ws.x.data(), ws.x.data() + ws.x.size()), re, im;
        for (Eigen::Index k = 0; k < ws.psi.size(); ++k) {
          re.push_back(ws.psi(k).real());
          im.push_back(ws.psi(k).imag());
        }
        st["x"] = x;
        st["re_psi"] = re;
        st["im_psi"] = im;
        ojson warnings = ojson::array();
        for (const auto &wmsg : ws.diagnostics.warnings)
          warnings.push_back(wmsg);
        st["warnings"] = warnings;
        states.push_back(st);
      }
      e["states"] = states;
      list.push_back(e);
    }
    j["snapshots"] = list;
    const std::string path = out_path(c, "evolve.json");
    write_atomic(path, json_text(j));
    res.files.push_back(path);
  }
  summary << snaps.size() << " snapshot(s)";
  for (const auto &s : snaps)
    if (!std::isnan(s.discrepancy))
      summary << "\n  t = " << format_number(s.t) << "  discrepancy " << format_number(s.discrepancy);
  res.summary = summary.str();
  return res;
}

namespace {

ojson report_json(const RegimeReport &r) {
  ojson j;
  j["gamma1_exact"] = r.gamma1_exact;
  j["gamma1_formula"] = r.gamma1_formula;
  j["tau1"] = r.tau1;
  j["c1"] = r.c1;
  j["start_rate"] = r.start_rate;
  j["gamma_fit"] = r.exponential.rate;
  j["gamma_fit_ratio"] = r.exponential.rate / r.gamma1_exact;
  j["exp_intercept"] = r.exponential.intercept;
  j["exp_window"] = {r.exp_lo, r.exp_hi};
  j["s_fit"] = r.tail.exponent;
  j["s_fit_half_width"] = r.tail.half_width;
  j["tail_window"] = {r.tail_lo, r.tail_hi};
  j["t_star_theory"] = r.t_star_theory;
  j["t_star_measured"] = r.t_star_measured;
  j["ten_tau1_ln_lambda"] = r.log_estimate;
  j["p_at_t_star"] = r.p_at_t_star;
  j["log10_lambda_power"] = r.log10_lambda_power;
  return j;
}

DecayCurve survival_curve(const RunConfig &c, const std::optional<RegimeReport> &rep) {
  if (!c.times.empty())
    return nonescape_curve(c.initial_profile(), resolve_times(c), c.well(), c.curve_options());
  if (rep)
    return rep->curve;
  const double a2 = c.width * c.width;
  const auto times = geometric_times(1e-3 * a2, 1e3 * a2, 25);
  return nonescape_curve(c.initial_profile(), times, c.well(), c.curve_options());
}

std::optional<RegimeReport> maybe_report(const RunConfig &c) {
  if (!c.well().metastable())
    return std::nullopt;
  RegimeOptions o;
  o.curve = c.curve_options();
  return regime_report(c.initial_profile(), c.well(), o);
}

} // namespace

CommandResult cmd_survival(const RunConfig &c) {
  c.validate();
  if (!c.times.empty())
    (void)resolve_times(c);
  const auto rep = maybe_report(c);
  const DecayCurve curve = survival_curve(c, rep);

  CommandResult res;
  ojson j = json_envelope(c, "survival");
  j["report"] = rep ? report_json(*rep) : ojson(nullptr);
  ojson warnings = ojson::array();
  if (!rep)
    warnings.push_back("lambda < 10: regime fits need an opaque barrier");
  for (const auto &wmsg : curve.warnings)
    warnings.push_back(wmsg);
  j["warnings"] = warnings;

  if (c.format == Format::csv) {
    CsvWriter csv(csv_preamble(c));
    csv.header({"t", "P", "method"});
    for (std::size_t i = 0; i < curve.size(); ++i) {
      csv.cell(curve.times[i]).cell(curve.probability[i]).cell(to_string(curve.methods[i]));
      csv.end();
    }
    const std::string path = out_path(c, "survival.csv");
    write_atomic(path, csv.text());
    res.files.push_back(path);
  } else {
    ojson pts = ojson::array();
    for (std::size_t i = 0; i < curve.size(); ++i)
      pts.push_back({{"t", curve.times[i]},
                     {"P", curve.probability[i]},
                     {"method", to_string(curve.methods[i])}});
    j["curve"] = pts;
  }
  const std::string path = out_path(c, "report.json");
  write_atomic(path, json_text(j));
  res.files.push_back(path);

  std::ostringstream s;
  s << curve.size() << " samples";
  if (rep)
    s << "; Gamma_fit/Gamma_1 = " << format_number(rep->exponential.rate / rep->gamma1_exact)
      << ", s_fit = " << format_number(rep->tail.exponent);
  res.summary = s.str();
  return res;
}

CommandResult cmd_report(const RunConfig &c) {
  c.validate();
  const auto rows = pole_rows(c);
  const auto rep = maybe_report(c);

  std::ostringstream txt;
  auto line = [&](const std::string &label, double v) {
    txt << "  " << label;
    for (std::size_t i = label.size(); i < 34; ++i)
      txt << ' ';
    txt << format_number(v) << "\n";
  };
  txt << "gamow_lab " << version << "\n";
  txt << "config " << c.to_json().dump() << "\n\n";
  txt << "poles (k a)\n";
  for (const auto &row : rows) {
    txt << "  n = " << row.r.index << "  " << format_number(row.r.k.real() * c.width)
        << "  " << format_number(row.r.k.imag() * c.width) << "  tau = "
        << format_number(row.r.lifetime());
    if (!row.warning.empty())
      txt << "  [" << row.warning << "]";
    txt << "\n";
  }
  if (rep) {
    const auto &r = *rep;
    txt << "\nexponential regime\n";
    line("Gamma_1 (pole)", r.gamma1_exact);
    line("Gamma_1 = 4 pi^3 / (lambda a)^2", r.gamma1_formula);
    line("tau_1", r.tau1);
    line("c_1", r.c1);
    line("fitted rate", r.exponential.rate);
    line("fitted rate / Gamma_1", r.exponential.rate / r.gamma1_exact);
    line("sum c_n Gamma_n (pure-pole dP/dt)", r.start_rate);
    txt << "\nlong-time tail\n";
    line("fitted exponent", r.tail.exponent);
    line("exponent half width", r.tail.half_width);
    txt << "\ncrossover\n";
    line("t* (c_1 e^{-t/tau_1} = P_asym)", r.t_star_theory);
    line("t* (fitted branches)", r.t_star_measured);
    line("10 tau_1 ln lambda", r.log_estimate);
    line("t* / tau_1", r.t_star_measured / r.tau1);
    line("P(t*)", r.p_at_t_star);
    line("lambda^-10", std::pow(10.0, r.log10_lambda_power));
  } else {
    txt << "\nlambda < 10: no regime analysis\n";
  }

  CommandResult res;
  std::string path;
  if (c.format == Format::json) {
    ojson j = json_envelope(c, "report");
    ojson poles = ojson::array();
    for (const auto &row : rows)
      poles.push_back({{"n", row.r.index},
                       {"re_ka", row.r.k.real() * c.width},
                       {"im_ka", row.r.k.imag() * c.width},
                       {"tau", row.r.lifetime()},
                       {"warning", row.warning}});
    j["poles"] = poles;
    j["report"] = rep ? report_json(*rep) : ojson(nullptr);
    path = out_path(c, "report.json");
    write_atomic(path, json_text(j));
  } else {
    path = out_path(c, "report.txt");
    write_atomic(path, txt.str());
  }
  res.files.push_back(path);
  res.summary = txt.str();
  return res;
}

} // namespace gamow::cli
