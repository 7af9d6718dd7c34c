#ifndef MSSEG_PIPELINE_HPP
#define MSSEG_PIPELINE_HPP

#include "msseg/eval.hpp"
#include "msseg/features.hpp"
#include "msseg/mesh.hpp"
#include "msseg/solver.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace msseg {

struct RunConfig {
  std::string mesh_path;
  SolverParams params;
  Ring ring = Ring::N2;
  std::vector<std::string> ground_truth_paths;
  std::string output_dir = ".";
  bool write_features = false;

  /// Mirrors SolverParams::validate and checks that the input paths exist.
  void validate() const;
};

struct RunOutcome {
  SegmentationResult result;
  std::optional<double> rand_index;
  std::string seg_path;
  std::string ply_path;
  std::string report_path;
};

/// load -> features -> solve -> classify -> score, then writes
/// <stem>.seg, <stem>_colored.ply and <stem>_report.json into output_dir.
RunOutcome run(const RunConfig& config);

/// Deterministic color for a label: a fixed 19-entry table, then golden-ratio
/// hue steps.
std::array<int, 3> palette_color(int label);

/// ASCII PLY with one flat color per face.
void export_colored_mesh(std::ostream& out, const TriMesh& mesh, const Eigen::VectorXi& labels);
void export_colored_mesh(const TriMesh& mesh, const Eigen::VectorXi& labels, const std::string& path);

/// RunConfig stored in a report written by run(); alpha is the resolved value,
/// so replaying does not depend on re-estimating it.
RunConfig config_from_report(const std::string& report_path);

Ring parse_ring(const std::string& name);
const char* to_string(Ring ring);

}  // namespace msseg

#endif  // MSSEG_PIPELINE_HPP
