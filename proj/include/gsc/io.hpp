#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "gsc/carpet.hpp"
#include "gsc/dirichlet.hpp"
#include "gsc/scaling.hpp"

namespace gsc {

using Json = nlohmann::ordered_json;

/// Canonical spec object {"d": .., "l": .., "S": [[..], ..]} with cells in
/// encoding order. The canonical compact dump is the hashing preimage.
Json spec_to_json(const CarpetSpec& spec);
std::string spec_canonical_string(const CarpetSpec& spec);

/// FNV-1a 64-bit hash of the canonical spec string, as 16 hex digits.
std::string spec_hash(const CarpetSpec& spec);

/// Parses and validates a spec object; error messages name the offending
/// field or tuple.
CarpetSpec spec_from_json(const Json& j);
CarpetSpec load_spec_file(const std::filesystem::path& path);
void save_spec_file(const CarpetSpec& spec, const std::filesystem::path& path);

Json validation_to_json(const CarpetSpec& spec, const ValidationReport& report);
Json scaling_to_json(const CarpetSpec& spec, const ScalingReport& report,
                     const WitnessVerdict* witness);
std::string scaling_to_csv(const ScalingReport& report);
Json walk_to_json(const CarpetSpec& spec, const WalkStats& stats);
Json profile_to_json(const CarpetSpec& spec, const CellGraph& graph,
                     const EnergyProfile& profile);
std::string profile_to_csv(const EnergyProfile& profile);

/// Per-cell solution dump: one row per cell, origin coordinates then value.
std::string solution_to_csv(const CellGraph& graph, std::span<const double> values);
Json solution_meta_json(const CarpetSpec& spec, const HarmonicSolution& sol);

/// Adjacency dump (facet edges) plus a separate JSON header.
std::string graph_to_csv(const CellGraph& graph);
Json graph_header_json(const CarpetSpec& spec, const CellGraph& graph);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gsc
