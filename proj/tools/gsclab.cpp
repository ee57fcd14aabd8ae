// Command-line front end: validate carpet specs, generate the slab-balanced
// counterexample family, run conductance-scaling reports, random-walk
// crossings and energy-concentration profiles. Every run writes a manifest
// (config echo, spec hash, versions, timestamp) before any result file;
// result files carry no timestamps, so identical configurations produce
// byte-identical outputs.
//
// Exit codes: 0 ok, 1 checked negative, 2 usage/parse, 3 resource,
// 4 numerical failure.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "gsc/carpet.hpp"
#include "gsc/errors.hpp"
#include "gsc/io.hpp"
#include "gsc/scaling.hpp"
#include "gsc/version.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;
constexpr int kExitNumerical = 4;

struct Options {
  std::string command;
  std::string spec_path;
  std::string builtin;
  std::string counterexample;
  std::string output_file;
  int levels = 0;
  int level = 1;
  int coarsen = 0;
  double tol = 1e-10;
  std::int64_t budget = gsc::kDefaultCellBudget;
  std::int64_t trials = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir = "gsclab_out";
  std::string formats = "json,csv";
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::set<std::string> parse_formats(const std::string& formats) {
  std::set<std::string> out;
  std::stringstream ss(formats);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item != "json" && item != "csv") {
      throw gsc::SpecError("unknown output format: " + item);
    }
    out.insert(item);
  }
  if (out.empty()) throw gsc::SpecError("no output format selected");
  return out;
}

gsc::Json config_echo(const Options& opt) {
  gsc::Json j;
  j["command"] = opt.command;
  if (!opt.spec_path.empty()) j["spec"] = opt.spec_path;
  if (!opt.builtin.empty()) j["builtin"] = opt.builtin;
  if (!opt.counterexample.empty()) j["counterexample"] = opt.counterexample;
  if (!opt.output_file.empty()) j["output"] = opt.output_file;
  if (opt.command == "dw") j["levels"] = opt.levels;
  if (opt.command == "walk" || opt.command == "profile") j["level"] = opt.level;
  if (opt.command == "profile") j["coarsen"] = opt.coarsen;
  if (opt.command == "walk") {
    j["trials"] = opt.trials;
    j["seed"] = opt.seed;
  }
  j["tol"] = opt.tol;
  j["budget"] = opt.budget;
  j["threads"] = opt.threads;
  j["out"] = opt.out_dir;
  j["format"] = opt.formats;
  return j;
}

void write_manifest(const Options& opt, const gsc::CarpetSpec* spec, const std::string& error) {
  fs::create_directories(opt.out_dir);
  gsc::Json manifest;
  manifest["artifact"] = gsc::kArtifactName;
  manifest["artifact_version"] = gsc::kArtifactVersion;
  manifest["schema_version"] = gsc::kSchemaVersion;
  manifest["created_utc"] = utc_timestamp();
  manifest["config"] = config_echo(opt);
  manifest["spec_hash"] = spec ? gsc::Json(gsc::spec_hash(*spec)) : gsc::Json(nullptr);
  if (!error.empty()) manifest["error"] = error;
  gsc::write_text_file(fs::path(opt.out_dir) / "manifest.json", manifest.dump(2) + "\n");
}

gsc::CarpetSpec resolve_spec(const Options& opt) {
  const bool has_file = !opt.spec_path.empty();
  const bool has_builtin = !opt.builtin.empty();
  if (has_file == has_builtin) {
    throw gsc::SpecError("provide exactly one spec source: a file path or --builtin NAME");
  }
  return has_builtin ? gsc::builtin_spec(opt.builtin) : gsc::load_spec_file(opt.spec_path);
}

void print_validation(const gsc::ValidationReport& report) {
  auto line = [](const char* name, bool pass) {
    std::cout << "  " << name << ": " << (pass ? "pass" : "FAIL") << "\n";
  };
  line("GSC1 symmetry      ", report.symmetry.pass);
  if (report.symmetry.witness) {
    const auto& w = *report.symmetry.witness;
    std::cout << "    witness: cell (";
    for (std::size_t k = 0; k < w.cell.size(); ++k) std::cout << (k ? "," : "") << w.cell[k];
    std::cout << ") maps to (";
    for (std::size_t k = 0; k < w.image.size(); ++k) std::cout << (k ? "," : "") << w.image[k];
    std::cout << ") outside the cell set\n";
  }
  line("GSC2 connectedness ", report.connectedness.pass);
  if (report.connectedness.witness) {
    std::cout << "    witness: " << report.connectedness.components
              << " components; two cells in distinct components reported\n";
  }
  line("GSC3 nondiagonality", report.nondiagonality.pass);
  if (report.nondiagonality.witness) {
    if (report.nondiagonality.witness->pair) {
      std::cout << "    witness: touching cell pair with no unit-step path\n";
    } else {
      std::cout << "    witness: disconnected block (";
      const auto& b = report.nondiagonality.witness->block;
      for (std::size_t k = 0; k < b.size(); ++k) std::cout << (k ? "," : "") << b[k];
      std::cout << ")\n";
    }
  }
  line("GSC4 border        ", report.border.pass);
  if (report.border.witness) {
    std::cout << "    witness: border cell with first coordinate "
              << report.border.witness->missing_index << " missing\n";
  }
  std::cout << "  BB99 slab condition: " << (report.bb99.holds ? "holds" : "fails")
            << " (informational)\n";
}

int cmd_validate(const Options& opt) {
  const gsc::CarpetSpec spec = resolve_spec(opt);
  write_manifest(opt, &spec, "");
  const gsc::ValidationReport report = gsc::validate_spec(spec);
  parse_formats(opt.formats);  // validated; the JSON report is always written
  gsc::write_text_file(fs::path(opt.out_dir) / "validate.json",
                       gsc::validation_to_json(spec, report).dump(2) + "\n");
  std::cout << "validate: d=" << spec.d << " l=" << spec.l << " cells=" << spec.count()
            << "\n";
  print_validation(report);
  std::cout << (report.all_pass() ? "all axioms pass" : "axiom failure") << "\n";
  return report.all_pass() ? kExitOk : kExitNegative;
}

int cmd_dw(const Options& opt) {
  if (opt.levels < 2) {
    std::cerr << "dw: need --levels >= 2 to form a conductance ratio\n";
    return kExitUsage;
  }
  const gsc::CarpetSpec spec = resolve_spec(opt);
  write_manifest(opt, &spec, "");
  const gsc::ValidationReport validation = gsc::validate_spec(spec);
  if (!validation.all_pass()) {
    std::cout << "dw: spec fails the carpet axioms\n";
    print_validation(validation);
    return kExitNegative;
  }
  const gsc::ScalingReport report =
      gsc::resistance_sequence(spec, opt.levels, gsc::ScalingOptions{opt.tol, opt.budget});
  const gsc::WitnessVerdict* witness_ptr = nullptr;
  gsc::WitnessVerdict witness;
  if (report.complete) {
    witness = gsc::dw_witness(report);
    witness_ptr = &witness;
  }
  const auto formats = parse_formats(opt.formats);
  gsc::write_text_file(fs::path(opt.out_dir) / "dw.json",
                       gsc::scaling_to_json(spec, report, witness_ptr).dump(2) + "\n");
  if (formats.count("csv")) {
    gsc::write_text_file(fs::path(opt.out_dir) / "dw.csv", gsc::scaling_to_csv(report));
  }
  for (const gsc::LevelEntry& e : report.levels) {
    std::cout << "level " << e.level << ": cells=" << e.cells << " energy=" << e.energy
              << " residual=" << e.residual << "\n";
  }
  for (const gsc::RatioEntry& r : report.ratios) {
    std::cout << "ratio " << r.from_level << "->" << r.from_level + 1 << ": " << r.ratio
              << " dw=" << r.dw_estimate << " margin=" << r.margin
              << " glue_gap=" << r.glue_gap_abs << "\n";
  }
  if (!report.complete) {
    std::cerr << "dw: incomplete: " << report.incomplete_reason << "\n";
    return report.incomplete_kind == gsc::IncompleteKind::budget ? kExitResource
                                                                 : kExitNumerical;
  }
  std::cout << "witness " << (witness.pass ? "pass" : "FAIL")
            << ": min margin = " << witness.min_margin
            << ", min glue gap = " << witness.min_glue_gap_abs << "\n";
  return witness.pass ? kExitOk : kExitNegative;
}

int cmd_walk(const Options& opt) {
  const gsc::CarpetSpec spec = resolve_spec(opt);
  write_manifest(opt, &spec, "");
  const gsc::ValidationReport validation = gsc::validate_spec(spec);
  if (!validation.all_pass()) {
    std::cout << "walk: spec fails the carpet axioms\n";
    print_validation(validation);
    return kExitNegative;
  }
  gsc::WalkOptions wopt;
  wopt.threads = opt.threads;
  wopt.cell_budget = opt.budget;
  const gsc::WalkStats stats =
      gsc::random_walk_crossing(spec, opt.level, opt.trials, opt.seed, wopt);
  parse_formats(opt.formats);
  gsc::write_text_file(fs::path(opt.out_dir) / "walk.json",
                       gsc::walk_to_json(spec, stats).dump(2) + "\n");
  std::cout << "walk: level " << stats.level << ", " << stats.trials
            << " trials, mean crossing " << stats.mean_steps << " +- " << stats.std_error
            << " steps (max " << stats.max_steps << ")\n";
  return kExitOk;
}

int cmd_profile(const Options& opt) {
  const gsc::CarpetSpec spec = resolve_spec(opt);
  write_manifest(opt, &spec, "");
  const gsc::ValidationReport validation = gsc::validate_spec(spec);
  if (!validation.all_pass()) {
    std::cout << "profile: spec fails the carpet axioms\n";
    print_validation(validation);
    return kExitNegative;
  }
  if (opt.coarsen >= opt.level) {
    std::cerr << "profile: --coarsen must be below --level\n";
    return kExitUsage;
  }
  const gsc::CellGraph graph =
      gsc::build_cell_graph(spec, opt.level, gsc::GraphOptions{opt.budget, false});
  const gsc::HarmonicSolution sol =
      gsc::solve_face_problem(graph, 0, gsc::SolveOptions{opt.tol, 0});
  const gsc::EnergyProfile profile = gsc::energy_profile(graph, sol.values, opt.coarsen);
  const auto formats = parse_formats(opt.formats);
  gsc::write_text_file(fs::path(opt.out_dir) / "profile.json",
                       gsc::profile_to_json(spec, graph, profile).dump(2) + "\n");
  if (formats.count("csv")) {
    gsc::write_text_file(fs::path(opt.out_dir) / "profile.csv", gsc::profile_to_csv(profile));
  }
  std::cout << "profile: level " << opt.level << " coarsened to " << opt.coarsen << "\n";
  for (const gsc::ConcentrationPoint& p : profile.curve) {
    std::cout << "  " << p.fraction * 100 << "% of energy in " << p.cells
              << " cells (mu-mass " << p.mu_mass << ")\n";
  }
  return kExitOk;
}

int cmd_generate(const Options& opt) {
  const auto comma = opt.counterexample.find(',');
  if (comma == std::string::npos) {
    std::cerr << "generate: --counterexample expects \"D,L\"\n";
    return kExitUsage;
  }
  const int d = std::stoi(opt.counterexample.substr(0, comma));
  const int l_param = std::stoi(opt.counterexample.substr(comma + 1));
  const gsc::CarpetSpec spec = gsc::gen_counterexample(d, l_param);
  write_manifest(opt, &spec, "");
  const fs::path out = opt.output_file.empty()
                           ? fs::path(opt.out_dir) / "counterexample.json"
                           : fs::path(opt.output_file);
  gsc::save_spec_file(spec, out);
  std::cout << "generate: wrote spec d=" << spec.d << " l=" << spec.l
            << " cells=" << spec.count() << " to " << out.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"generalized Sierpinski carpet toolbox: axiom validation, "
               "conductance scaling, walk-dimension witnesses"};
  app.require_subcommand(1);
  app.fallthrough();

  auto add_spec_source = [&](CLI::App* cmd, bool with_positional) {
    cmd->add_option("--spec", opt.spec_path, "spec JSON file");
    cmd->add_option("--builtin", opt.builtin,
                    "builtin spec: sc, menger or counterexample:D,L");
    if (with_positional) cmd->add_option("spec_file", opt.spec_path, "spec JSON file");
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol", opt.tol, "solver tolerance (max-norm residual)");
    cmd->add_option("--budget", opt.budget, "cell budget per graph");
    cmd->add_option("--threads", opt.threads, "thread cap (0 = hardware)");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--format", opt.formats, "output formats, comma separated (json,csv)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check the four carpet axioms");
  add_spec_source(validate, true);
  add_common(validate);

  CLI::App* dw = app.add_subcommand("dw", "conductance ratios and the dw > 2 witness");
  add_spec_source(dw, true);
  dw->add_option("--levels", opt.levels, "finest level (needs >= 2)");
  add_common(dw);

  CLI::App* walk = app.add_subcommand("walk", "random-walk face crossing times");
  add_spec_source(walk, true);
  walk->add_option("--level", opt.level, "graph level");
  walk->add_option("--trials", opt.trials, "number of walks");
  walk->add_option("--seed", opt.seed, "random seed");
  add_common(walk);

  CLI::App* profile = app.add_subcommand("profile", "energy concentration over coarse cells");
  add_spec_source(profile, true);
  profile->add_option("--level", opt.level, "graph level");
  profile->add_option("--coarsen", opt.coarsen, "coarse level for the attribution");
  add_common(profile);

  CLI::App* generate = app.add_subcommand("generate", "write a counterexample spec file");
  generate->add_option("--counterexample", opt.counterexample, "family parameters \"D,L\"")
      ->required();
  generate->add_option("-o,--output", opt.output_file, "output spec path");
  add_common(generate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) {
      opt.command = "validate";
      return cmd_validate(opt);
    }
    if (dw->parsed()) {
      opt.command = "dw";
      return cmd_dw(opt);
    }
    if (walk->parsed()) {
      opt.command = "walk";
      return cmd_walk(opt);
    }
    if (profile->parsed()) {
      opt.command = "profile";
      return cmd_profile(opt);
    }
    if (generate->parsed()) {
      opt.command = "generate";
      return cmd_generate(opt);
    }
  } catch (const gsc::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gsc::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const gsc::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
