#include "artisim/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "artisim/controller.hpp"
#include "artisim/harness.hpp"
#include "artisim/ingest.hpp"
#include "artisim/params.hpp"
#include "artisim/plot.hpp"
#include "artisim/report.hpp"
#include "artisim/validation.hpp"

namespace artisim {

namespace fs = std::filesystem;

namespace {

constexpr double kRad2Deg = 180.0 / M_PI;

struct Options {
  std::vector<std::string> models;
  std::string load = "unloaded";
  std::string maneuver;
  std::optional<double> gain;
  std::string reference;
  std::string out_dir = ".";
  std::string format = "text";
  std::string params_file;
  std::vector<std::string> records;
};

/// A failure reported to the user with a specific exit code.
struct CliFailure {
  int code;
  std::string message;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

VehicleParams params_for(const Options& o, ModelKind model) {
  if (!o.params_file.empty()) return load_params(o.params_file);
  return builtin_params(parse_load_condition(o.load), model);
}

ControllerConfig controller_for(const Options& o) {
  ControllerConfig c;
  if (o.gain) c.K = *o.gain;
  return c;
}

void require_stabilizing(const ControllerConfig& c, const VehicleParams& p) {
  const double k_min = min_stabilizing_gain(p);
  if (!(c.K > k_min)) {
    throw CliFailure{kExitRefused, "reverse driving needs K > K_min: K = " + fmt("%g", c.K) +
                                       " <= K_min = " + fmt("%.3f", k_min)};
  }
}

fs::path prepare_out_dir(const Options& o) {
  fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliFailure{kExitUsage, "cannot create output directory " + dir.string() + ": " + ec.message()};
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CliFailure{kExitUsage, "cannot write " + path.string()};
  return os;
}

ReferenceSignals load_reference(const std::string& path, const VehicleParams& p) {
  if (!fs::exists(path)) throw CliFailure{kExitUsage, "reference log not found: " + path};
  return reference_from_log(parse_log(fs::path(path)), p);
}

ModelKind single_model(const Options& o) {
  if (o.models.size() > 1) throw CliFailure{kExitUsage, "simulate takes a single --model"};
  return o.models.empty() ? ModelKind::Stm : parse_model_kind(o.models.front());
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.maneuver.empty()) throw CliFailure{kExitUsage, "simulate needs --maneuver"};
  const ModelKind model = single_model(o);
  const VehicleParams p = params_for(o, model);
  SimConfig cfg;
  cfg.controller = controller_for(o);

  InputTrace trace;
  ArticulationReference articulation;
  std::string title;
  if (is_preset_name(o.maneuver)) {
    ManeuverSpec spec = maneuver_preset(o.maneuver);
    if (spec.kind == ManeuverKind::FigureEight) spec = tune_figure_eight(spec, p);
    trace = generate_maneuver(spec);
    articulation = driver_articulation_target(trace, p);
    title = o.maneuver;
  } else if (fs::exists(o.maneuver)) {
    const ReferenceSignals ref = load_reference(o.maneuver, p);
    trace = replay_trace(ref);
    articulation = {ref.t, ref.gamma};
    cfg.initial = initial_state_from(ref, p);
    title = fs::path(o.maneuver).filename().string();
  } else {
    throw CliFailure{kExitUsage, "unknown maneuver '" + o.maneuver + "' (not a preset or a readable log)"};
  }
  if (!o.reference.empty()) {
    const ReferenceSignals ref = load_reference(o.reference, p);
    articulation = {ref.t, ref.gamma};
  }

  if (trace.has_reverse()) require_stabilizing(cfg.controller, p);

  const SimResult result = simulate(model, trace, p, cfg, &articulation);
  const fs::path dir = prepare_out_dir(o);
  {
    auto os = open_out(dir / "trajectory.csv");
    write_trajectory(os, result.trajectory);
  }
  {
    auto os = open_out(dir / "log.csv");
    write_log(os, log_from_trajectory(result.trajectory, p));
  }
  {
    auto os = open_out(dir / "path.svg");
    os << trajectory_svg(result.trajectory, std::string(to_string(model)) + " " + title);
  }

  const Trajectory& tr = result.trajectory;
  out << "model: " << to_string(model) << '\n';
  out << "max |gamma|: " << fmt("%.4f", result.max_abs_gamma) << " rad (" << fmt("%.2f", result.max_abs_gamma * kRad2Deg)
      << " deg)\n";
  if (tr.size() > 0) {
    const std::size_t k = tr.size() - 1;
    out << "final pose: t=" << fmt("%.2f", tr.t[k]) << " s X1=" << fmt("%.3f", tr.X1[k]) << " m Y1="
        << fmt("%.3f", tr.Y1[k]) << " m psi1=" << fmt("%.4f", tr.psi1[k]) << " rad gamma=" << fmt("%.4f", tr.gamma[k])
        << " rad\n";
  }
  if (result.first_warning_time) out << "guard warning at t=" << fmt("%.2f", *result.first_warning_time) << " s\n";
  out << "wrote " << (dir / "trajectory.csv").string() << ", " << (dir / "log.csv").string() << ", "
      << (dir / "path.svg").string() << '\n';
  if (result.aborted) {
    err << "jackknife guard abort at t=" << fmt("%.2f", *result.abort_time) << " s, |gamma| = "
        << fmt("%.2f", result.max_abs_gamma * kRad2Deg) << " deg\n";
    return kExitAborted;
  }
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.reference.empty()) throw CliFailure{kExitUsage, "validate needs --reference"};
  const ReportFormat format = parse_report_format(o.format);
  std::vector<std::string> names = o.models;
  if (names.empty()) names = {"kin", "stm"};

  ValidationConfig vcfg;
  vcfg.controller = controller_for(o);
  std::vector<ErrorReport> reports;
  std::vector<PathSeries> paths;
  const char* colors[] = {"#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::size_t color = 0;
  ReferenceSignals ref;
  for (const auto& name : names) {
    const ModelKind model = parse_model_kind(name);
    const VehicleParams p = params_for(o, model);
    ref = load_reference(o.reference, p);
    if (ref.has_reverse()) require_stabilizing(vcfg.controller, p);
    const ValidationResult r = validate_model(model, p, ref, vcfg);
    if (r.sim.aborted) {
      err << to_string(model) << ": jackknife guard abort at t=" << fmt("%.2f", *r.sim.abort_time)
          << " s, scored up to the abort\n";
    }
    reports.push_back(r.report);
    paths.push_back({std::string(to_string(model)) + " tractor", colors[color++ % 4], r.sim.trajectory.X1,
                     r.sim.trajectory.Y1});
  }
  paths.insert(paths.begin(), PathSeries{"reference tractor", "#000000", ref.X1, ref.Y1});

  const std::string table = render_table(reports, format);
  out << table;
  const fs::path dir = prepare_out_dir(o);
  {
    auto os = open_out(dir / "errors.csv");
    write_error_records(os, reports);
  }
  {
    auto os = open_out(dir / (format == ReportFormat::Text ? "report.txt" : "report.csv"));
    os << table;
  }
  {
    std::vector<double> gamma_deg(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) gamma_deg[i] = ref.gamma[i] * kRad2Deg;
    auto os = open_out(dir / "validate.svg");
    os << render_svg("validation against " + fs::path(o.reference).filename().string(), paths,
                     {{"reference articulation [deg]", {{"gamma", "#000000", ref.t, gamma_deg}}}});
  }
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  if (o.records.empty()) throw CliFailure{kExitUsage, "report needs at least one errors file"};
  const ReportFormat format = parse_report_format(o.format);
  std::vector<ErrorReport> all;
  for (const auto& path : o.records) {
    std::ifstream is(path);
    if (!is) throw CliFailure{kExitUsage, "cannot read " + path};
    auto records = read_error_records(is);
    all.insert(all.end(), records.begin(), records.end());
  }
  out << render_table(aggregate_reports(all), format);
  return kExitOk;
}

int cmd_params(const Options& o, std::ostream& out) {
  const ModelKind model = single_model(o);
  const VehicleParams p = params_for(o, model);
  out << serialize_params(p);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tractor-semitrailer model simulation and validation"};
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--load", o.load, "Load condition")
        ->check(CLI::IsMember({"unloaded", "loaded"}));
    sub->add_option("--params", o.params_file, "Parameter file overriding the built-in set");
  };
  const auto add_model = [&](CLI::App* sub, bool many) {
    auto* opt = sub->add_option("--model", o.models, many ? "Models to validate" : "Model")
                    ->check(CLI::IsMember({"kin", "stm"}));
    if (many) {
      opt->delimiter(',');
    } else {
      opt->expected(1);
    }
  };

  auto* sim = app.add_subcommand("simulate", "Run a maneuver through one model");
  add_model(sim, false);
  add_common(sim);
  sim->add_option("--maneuver", o.maneuver, "Preset name or a log file to replay")->required();
  sim->add_option("--gain", o.gain, "Articulation feedback gain K");
  sim->add_option("--reference", o.reference, "Log whose articulation the reverse loop tracks");
  sim->add_option("--out", o.out_dir, "Output directory");

  auto* val = app.add_subcommand("validate", "Score models against a reference log");
  add_model(val, true);
  add_common(val);
  val->add_option("--reference", o.reference, "Reference log")->required();
  val->add_option("--gain", o.gain, "Articulation feedback gain K");
  val->add_option("--out", o.out_dir, "Output directory");
  val->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"text", "delimited"}));

  auto* rep = app.add_subcommand("report", "Average per-maneuver error files into one table");
  rep->add_option("errors", o.records, "errors.csv files")->required();
  rep->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"text", "delimited"}));

  auto* par = app.add_subcommand("params", "Print a parameter set");
  add_model(par, false);
  add_common(par);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (val->parsed()) return cmd_validate(o, out, err);
    if (rep->parsed()) return cmd_report(o, out);
    return cmd_params(o, out);
  } catch (const CliFailure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace artisim
