#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wflow/eigensolver.hpp"
#include "wflow/flow.hpp"
#include "wflow/stagnation.hpp"
#include "wflow/tracking.hpp"

// Run artifacts: lattice scalars as CSV matrices (rows follow x, columns
// follow p, one leading '#' line with the lattice metadata), everything else
// as JSON sidecars next to them. Doubles are printed with %.17g so a
// dump-load cycle reproduces bits.

namespace wflow::io {

std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// extra is appended to the metadata header line; readers skip '#' lines
void write_matrix_csv(const std::filesystem::path& path, const PhaseSpaceGrid& grid,
                      const std::vector<double>& values, const std::string& extra = "");
std::vector<double> read_matrix_csv(const std::filesystem::path& path,
                                    const PhaseSpaceGrid& grid);

// name.csv + name.json
void write_field(const std::filesystem::path& dir, const std::string& name,
                 const WignerField& field);
WignerField read_field(const std::filesystem::path& dir, const std::string& name);

// flow_jx.csv, flow_jp.csv + flow.json
void write_flow_files(const std::filesystem::path& dir, const FlowField& flow);
FlowField read_flow_files(const std::filesystem::path& dir);

void write_stagnation(const std::filesystem::path& dir, const StagnationSet& set,
                      bool include_curves = true);
StagnationSet read_stagnation(const std::filesystem::path& dir);

// states.csv: first column the position samples, one column per state
void write_states_csv(const std::filesystem::path& dir, const EigenstateBasis& basis);

void write_solve_report(const std::filesystem::path& dir, const SolveReport& report,
                        const std::string& states_csv = "");

void write_track(const std::filesystem::path& dir, const TrackResult& result);

void write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& argv,
                    const std::vector<std::string>& outputs);
std::vector<std::string> manifest_argv(const std::filesystem::path& manifest_file);

} // namespace wflow::io
