#include "gsc/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "gsc/errors.hpp"
#include "gsc/version.hpp"

namespace gsc {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json tuple_to_json(const Tuple& t) {
  Json arr = Json::array();
  for (int v : t) arr.push_back(v);
  return arr;
}

Json symmetry_to_json(const CubeSymmetry& g) {
  Json j;
  j["perm"] = Json::array();
  for (int k : g.perm) j["perm"].push_back(k);
  j["flips"] = Json::array();
  for (int f : g.flips) j["flips"].push_back(f != 0);
  return j;
}

}  // namespace

Json spec_to_json(const CarpetSpec& spec) {
  Json j;
  j["d"] = spec.d;
  j["l"] = spec.l;
  Json cells = Json::array();
  for (const Tuple& t : spec.cells) cells.push_back(tuple_to_json(t));
  j["S"] = std::move(cells);
  return j;
}

std::string spec_canonical_string(const CarpetSpec& spec) { return spec_to_json(spec).dump(); }

std::string spec_hash(const CarpetSpec& spec) {
  const std::string s = spec_canonical_string(spec);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

CarpetSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw SpecError("spec: top-level JSON value must be an object");
  for (const char* key : {"d", "l", "S"}) {
    if (!j.contains(key)) throw SpecError(std::string("spec: missing field \"") + key + "\"");
  }
  if (!j["d"].is_number_integer()) throw SpecError("spec: field \"d\" must be an integer");
  if (!j["l"].is_number_integer()) throw SpecError("spec: field \"l\" must be an integer");
  if (!j["S"].is_array()) throw SpecError("spec: field \"S\" must be an array of tuples");
  const int d = j["d"].get<int>();
  const int l = j["l"].get<int>();
  std::vector<Tuple> cells;
  cells.reserve(j["S"].size());
  std::size_t row = 0;
  for (const auto& item : j["S"]) {
    if (!item.is_array()) {
      throw SpecError("spec: S[" + std::to_string(row) + "] is not an array");
    }
    Tuple t;
    t.reserve(item.size());
    for (const auto& v : item) {
      if (!v.is_number_integer()) {
        throw SpecError("spec: S[" + std::to_string(row) + "] has a non-integer entry");
      }
      t.push_back(v.get<std::int32_t>());
    }
    cells.push_back(std::move(t));
    ++row;
  }
  return CarpetSpec::create(d, l, std::move(cells));
}

CarpetSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file: " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError("spec file " + path.string() + ": " + e.what());
  }
  return spec_from_json(j);
}

void save_spec_file(const CarpetSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, spec_to_json(spec).dump(2) + "\n");
}

Json validation_to_json(const CarpetSpec& spec, const ValidationReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["spec"] = {{"d", spec.d}, {"l", spec.l}, {"cells", spec.count()}};
  j["spec_hash"] = spec_hash(spec);

  Json sym;
  sym["pass"] = report.symmetry.pass;
  if (report.symmetry.witness) {
    const auto& w = *report.symmetry.witness;
    sym["witness"] = {{"symmetry", symmetry_to_json(w.g)},
                      {"cell", tuple_to_json(w.cell)},
                      {"image", tuple_to_json(w.image)}};
  }
  j["gsc1_symmetry"] = std::move(sym);

  Json conn;
  conn["pass"] = report.connectedness.pass;
  conn["components"] = report.connectedness.components;
  if (report.connectedness.witness) {
    conn["witness"] = {{"cell_a", tuple_to_json(report.connectedness.witness->cell_a)},
                       {"cell_b", tuple_to_json(report.connectedness.witness->cell_b)}};
  }
  j["gsc2_connectedness"] = std::move(conn);

  Json nd;
  nd["pass"] = report.nondiagonality.pass;
  nd["method"] = nd_method_name(report.nondiagonality.method);
  if (report.nondiagonality.witness) {
    const auto& w = *report.nondiagonality.witness;
    Json wj;
    if (w.pair) {
      wj["pair"] = Json::array({tuple_to_json(w.pair->first), tuple_to_json(w.pair->second)});
    } else {
      wj["block"] = tuple_to_json(w.block);
    }
    nd["witness"] = std::move(wj);
  }
  j["gsc3_nondiagonality"] = std::move(nd);

  Json border;
  border["pass"] = report.border.pass;
  if (report.border.witness) {
    border["witness"] = {{"missing_index", report.border.witness->missing_index}};
  }
  j["gsc4_border"] = std::move(border);

  j["bb99"] = {{"holds", report.bb99.holds}, {"slab_counts", report.bb99.slab_counts}};
  j["overall_pass"] = report.all_pass();
  return j;
}

Json scaling_to_json(const CarpetSpec& spec, const ScalingReport& report,
                     const WitnessVerdict* witness) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["spec"] = {{"d", spec.d}, {"l", spec.l}, {"cells", spec.count()}};
  j["spec_hash"] = spec_hash(spec);
  j["params"] = {{"tol", report.tol}, {"cell_budget", report.cell_budget}};
  j["conductance_bound"] = report.conductance_bound;
  Json levels = Json::array();
  for (const LevelEntry& e : report.levels) {
    levels.push_back({{"level", e.level},
                      {"cells", e.cells},
                      {"energy", e.energy},
                      {"residual", e.residual},
                      {"iterations", e.iterations},
                      {"presym_asymmetry", e.presym_asymmetry}});
  }
  j["levels"] = std::move(levels);
  Json ratios = Json::array();
  for (const RatioEntry& e : report.ratios) {
    ratios.push_back({{"from_level", e.from_level},
                      {"ratio", e.ratio},
                      {"dw_estimate", e.dw_estimate},
                      {"margin", e.margin},
                      {"glue_energy", e.glue_energy},
                      {"glue_gap_abs", e.glue_gap_abs},
                      {"glue_gap_rel", e.glue_gap_rel},
                      {"scaling_identity_rel_err", e.scaling_identity_rel_err}});
  }
  j["ratios"] = std::move(ratios);
  if (witness) {
    j["witness"] = {{"pass", witness->pass},
                    {"min_margin", witness->min_margin},
                    {"min_glue_gap_abs", witness->min_glue_gap_abs},
                    {"min_glue_gap_rel", witness->min_glue_gap_rel},
                    {"detail", witness->detail}};
  }
  j["complete"] = report.complete;
  if (!report.complete) j["incomplete_reason"] = report.incomplete_reason;
  return j;
}

std::string scaling_to_csv(const ScalingReport& report) {
  std::string csv = "level,energy,ratio,dw_estimate,margin,glue_gap\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelEntry& e = report.levels[i];
    csv += std::to_string(e.level) + "," + format_double(e.energy);
    if (i < report.ratios.size()) {
      const RatioEntry& r = report.ratios[i];
      csv += "," + format_double(r.ratio) + "," + format_double(r.dw_estimate) + "," +
             format_double(r.margin) + "," + format_double(r.glue_gap_abs);
    } else {
      csv += ",,,,";
    }
    csv += "\n";
  }
  return csv;
}

Json walk_to_json(const CarpetSpec& spec, const WalkStats& stats) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["spec"] = {{"d", spec.d}, {"l", spec.l}, {"cells", spec.count()}};
  j["spec_hash"] = spec_hash(spec);
  j["level"] = stats.level;
  j["trials"] = stats.trials;
  j["seed"] = stats.seed;
  j["mean_steps"] = stats.mean_steps;
  j["std_error"] = stats.std_error;
  j["max_steps"] = stats.max_steps;
  return j;
}

Json profile_to_json(const CarpetSpec& spec, const CellGraph& graph,
                     const EnergyProfile& profile) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["spec"] = {{"d", spec.d}, {"l", spec.l}, {"cells", spec.count()}};
  j["spec_hash"] = spec_hash(spec);
  j["level"] = graph.level;
  j["coarsen_level"] = profile.coarsen_level;
  j["empty"] = profile.empty;
  j["total_energy"] = profile.total_energy;
  Json curve = Json::array();
  for (const ConcentrationPoint& p : profile.curve) {
    curve.push_back({{"fraction", p.fraction}, {"cells", p.cells}, {"mu_mass", p.mu_mass}});
  }
  j["concentration"] = std::move(curve);
  std::int64_t coarse_side = 1;
  for (int t = 0; t < profile.coarsen_level; ++t) coarse_side *= spec.l;
  Json masses = Json::array();
  for (std::size_t i = 0; i < profile.masses.size(); ++i) {
    masses.push_back({{"origin", tuple_to_json(decode_tuple(profile.cell_codes[i],
                                                            coarse_side, spec.d))},
                      {"mass", profile.masses[i]}});
  }
  j["masses"] = std::move(masses);
  return j;
}

std::string profile_to_csv(const EnergyProfile& profile) {
  std::string csv = "fraction,cells,mu_mass\n";
  for (const ConcentrationPoint& p : profile.curve) {
    csv += format_double(p.fraction) + "," + std::to_string(p.cells) + "," +
           format_double(p.mu_mass) + "\n";
  }
  return csv;
}

std::string solution_to_csv(const CellGraph& graph, std::span<const double> values) {
  std::string csv;
  for (int k = 0; k < graph.d(); ++k) csv += "o" + std::to_string(k) + ",";
  csv += "value\n";
  for (std::int64_t i = 0; i < graph.cell_count(); ++i) {
    const auto origin = graph.origin(static_cast<std::int32_t>(i));
    for (int k = 0; k < graph.d(); ++k) csv += std::to_string(origin[k]) + ",";
    csv += format_double(values[i]) + "\n";
  }
  return csv;
}

Json solution_meta_json(const CarpetSpec& spec, const HarmonicSolution& sol) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["spec_hash"] = spec_hash(spec);
  j["level"] = sol.level;
  j["energy"] = sol.energy;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["tol"] = sol.tol;
  j["presym_asymmetry"] = sol.presym_asymmetry;
  j["symmetrized"] = sol.symmetrized;
  j["boundary_axis"] = sol.boundary0.axis;
  return j;
}

std::string graph_to_csv(const CellGraph& graph) {
  std::string csv;
  for (int k = 0; k < graph.d(); ++k) csv += "o" + std::to_string(k) + ",";
  for (int k = 0; k < graph.d(); ++k) {
    csv += "n" + std::to_string(k);
    csv += k + 1 < graph.d() ? "," : "\n";
  }
  for (const auto& [a, b] : graph.face_edges) {
    const auto oa = graph.origin(a);
    const auto ob = graph.origin(b);
    for (int k = 0; k < graph.d(); ++k) csv += std::to_string(oa[k]) + ",";
    for (int k = 0; k < graph.d(); ++k) {
      csv += std::to_string(ob[k]);
      csv += k + 1 < graph.d() ? "," : "\n";
    }
  }
  return csv;
}

Json graph_header_json(const CarpetSpec& spec, const CellGraph& graph) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["spec_hash"] = spec_hash(spec);
  j["level"] = graph.level;
  j["cells"] = graph.cell_count();
  j["face_edges"] = static_cast<std::int64_t>(graph.face_edges.size());
  j["touch_edges"] = static_cast<std::int64_t>(graph.touch_edges.size());
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path.string());
  out << text;
  if (!out) throw Error("failed writing output file: " + path.string());
}

}  // namespace gsc
