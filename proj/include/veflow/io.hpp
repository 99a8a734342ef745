#pragma once

#include <string>
#include <vector>

#include "veflow/diagnostics.hpp"
#include "veflow/solver.hpp"

namespace veflow {

// File outputs of a run, deterministic byte for byte for identical inputs:
//   diagnostics.csv              one row per time step, fixed column order
//   interface_XXXXXX.poly        closed polyline, one indexed vertex per line
//   bulk_XXXXXX.vtk              legacy ASCII unstructured grid with fields
void write_polyline(const std::string& path, const PolygonalCurve& curve);
void write_vtk(const std::string& path, const StateFields& state);
void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& series);

// Snapshot sink bound to an output directory; file names carry the step
// index.
struct OutputWriter {
  std::string dir;
  explicit OutputWriter(std::string out_dir);
  void snapshot(int step_index, const StateFields& state) const;
  void diagnostics(const std::vector<DiagnosticsRow>& series) const;
};

}  // namespace veflow
