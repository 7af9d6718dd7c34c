#include "msseg/pipeline.hpp"

#include "msseg/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <ostream>
#include <set>

namespace msseg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::array<int, 3>, 19> kPalette = {{
    {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},   {245, 130, 48},
    {145, 30, 180}, {70, 240, 240},  {240, 50, 230}, {210, 245, 60},  {250, 190, 212},
    {0, 128, 128},  {220, 190, 255}, {170, 110, 40}, {255, 250, 200}, {128, 0, 0},
    {170, 255, 195}, {128, 128, 0},  {255, 215, 180}, {0, 0, 128},
}};

std::array<int, 3> hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  auto q = [m](double ch) { return static_cast<int>(std::lround(255.0 * (ch + m))); };
  return {q(r), q(g), q(b)};
}

json kkt_json(const KktResiduals& kkt) {
  json j = json::object();
  for (const auto& [name, value] : kkt.entries) j[name] = value;
  return j;
}

json params_json(const RunConfig& config, const SegmentationResult& result) {
  const SolverParams& p = config.params;
  json j;
  j["mesh"] = config.mesh_path;
  j["mode"] = to_string(p.mode);
  j["K"] = p.K;
  j["alpha"] = result.alpha;
  j["alpha_auto"] = !p.alpha.has_value();
  j["beta_ratio"] = p.beta_ratio;
  j["beta"] = result.beta;
  j["alpha0"] = p.alpha0;
  j["eta"] = p.eta;
  j["r_p"] = p.r_p;
  j["r_q"] = p.r_q;
  j["r_z"] = p.r_z;
  j["inner_iters"] = p.inner_iters;
  j["outer_tol"] = p.outer_tol;
  j["max_outer"] = p.max_outer;
  j["seed"] = p.rng_seed;
  j["fallback_alpha"] = p.fallback_alpha;
  j["direct_limit"] = p.direct_limit;
  j["ring"] = to_string(config.ring);
  j["ground_truth"] = config.ground_truth_paths;
  return j;
}

void write_text(const std::string& path, const std::string& what, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open " + what + " for writing");
  body(out);
  out.flush();
  if (!out) throw IoError(path, "failed writing " + what);
}

}  // namespace

Ring parse_ring(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "face") return Ring::Face;
  if (lower == "n1") return Ring::N1;
  if (lower == "n2") return Ring::N2;
  throw ParameterError("unknown normal ring '" + name + "' (expected face, n1 or n2)");
}

const char* to_string(Ring ring) {
  switch (ring) {
    case Ring::Face: return "face";
    case Ring::N1: return "n1";
    case Ring::N2: return "n2";
  }
  return "unknown";
}

void RunConfig::validate() const {
  params.validate();
  if (mesh_path.empty()) throw ParameterError("no input mesh given");
  if (!fs::exists(mesh_path)) throw IoError(mesh_path, "mesh file does not exist");
  for (const auto& gt : ground_truth_paths) {
    if (!fs::exists(gt)) throw IoError(gt, "ground-truth file does not exist");
  }
}

std::array<int, 3> palette_color(int label) {
  if (label < 0) throw ParameterError("palette: negative label");
  if (label < static_cast<int>(kPalette.size())) return kPalette[static_cast<std::size_t>(label)];
  constexpr double kGolden = 0.618033988749894848;
  const double hue = std::fmod(0.1 + kGolden * (label - static_cast<int>(kPalette.size())), 1.0);
  return hsv_to_rgb(hue, 0.65, 0.9);
}

void export_colored_mesh(std::ostream& out, const TriMesh& mesh, const Eigen::VectorXi& labels) {
  if (labels.size() != mesh.num_faces()) throw DimensionError("export: label count differs from face count");
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << mesh.num_vertices() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "element face " << mesh.num_faces() << "\n";
  out << "property list uchar int vertex_indices\n";
  out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";
  out.precision(9);
  for (Index i = 0; i < mesh.num_vertices(); ++i) {
    out << mesh.vertices()(i, 0) << ' ' << mesh.vertices()(i, 1) << ' ' << mesh.vertices()(i, 2) << '\n';
  }
  for (Index t = 0; t < mesh.num_faces(); ++t) {
    const auto c = palette_color(labels(t));
    out << "3 " << mesh.faces()(t, 0) << ' ' << mesh.faces()(t, 1) << ' ' << mesh.faces()(t, 2) << ' ' << c[0]
        << ' ' << c[1] << ' ' << c[2] << '\n';
  }
}

void export_colored_mesh(const TriMesh& mesh, const Eigen::VectorXi& labels, const std::string& path) {
  write_text(path, "colored mesh", [&](std::ostream& out) { export_colored_mesh(out, mesh, labels); });
}

RunOutcome run(const RunConfig& config) {
  config.validate();
  const TriMesh mesh = load_mesh_file(config.mesh_path);
  const FeatureField features = feature_field(mesh, config.params.K, config.ring);

  RunOutcome outcome;
  outcome.result = amm_outer(mesh, features.values, config.params);
  const SegmentationResult& res = outcome.result;
  for (const auto& w : mesh.warnings()) outcome.result.warnings.push_back(w);

  FaceLabeling labeling;
  labeling.labels.assign(res.labels.data(), res.labels.data() + res.labels.size());
  if (!config.ground_truth_paths.empty()) {
    std::vector<FaceLabeling> truths;
    for (const auto& path : config.ground_truth_paths) truths.push_back(load_seg_file(path));
    outcome.rand_index = rand_index_dissimilarity(labeling, truths);
  }

  fs::create_directories(config.output_dir);
  const std::string stem = fs::path(config.mesh_path).stem().string();
  const fs::path dir(config.output_dir);
  outcome.seg_path = (dir / (stem + ".seg")).string();
  outcome.ply_path = (dir / (stem + "_colored.ply")).string();
  outcome.report_path = (dir / (stem + "_report.json")).string();

  write_text(outcome.seg_path, "labels", [&](std::ostream& out) { write_seg(out, labeling); });
  export_colored_mesh(mesh, res.labels, outcome.ply_path);
  if (config.write_features) {
    write_text((dir / (stem + "_features.txt")).string(), "features",
               [&](std::ostream& out) { write_feature_table(out, features); });
  }

  json report;
  report["parameters"] = params_json(config, res);
  report["mesh_stats"] = {{"faces", mesh.num_faces()}, {"edges", mesh.num_edges()},
                          {"vertices", mesh.num_vertices()}, {"boundary_edges", mesh.num_boundary_edges()}};
  if (res.alpha_estimated) {
    report["alpha_estimate"] = {{"value", res.alpha_estimate.value},
                                {"numerator", res.alpha_estimate.numerator},
                                {"denominator", res.alpha_estimate.denominator},
                                {"fallback", res.alpha_estimate.fallback}};
  }
  report["feature_eigenvalues"] = std::vector<double>(features.eigenvalues.data(),
                                                      features.eigenvalues.data() + features.eigenvalues.size());
  json trace = json::array();
  for (const auto& rec : res.records) {
    trace.push_back({{"iteration", rec.iteration}, {"error", rec.error}, {"energy", rec.energy},
                     {"kkt", kkt_json(rec.kkt)}, {"seconds", rec.seconds}});
  }
  report["iterations"] = std::move(trace);
  report["outer_iterations"] = res.records.size();
  report["converged"] = res.converged;
  report["kkt"] = kkt_json(res.kkt);
  report["solver_seconds"] = res.seconds;
  std::set<int> present(res.labels.data(), res.labels.data() + res.labels.size());
  report["labels_present"] = std::vector<int>(present.begin(), present.end());
  report["warnings"] = res.warnings;
  if (outcome.rand_index) report["rand_index_dissimilarity"] = *outcome.rand_index;
  report["outputs"] = {{"seg", outcome.seg_path}, {"ply", outcome.ply_path}};

  write_text(outcome.report_path, "report", [&](std::ostream& out) { out << report.dump(2) << '\n'; });
  return outcome;
}

RunConfig config_from_report(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in) throw IoError(report_path, "cannot open report");
  json report;
  try {
    in >> report;
    const json& p = report.at("parameters");
    RunConfig c;
    c.mesh_path = p.at("mesh").get<std::string>();
    c.params.mode = parse_mode(p.at("mode").get<std::string>());
    c.params.K = p.at("K").get<int>();
    c.params.alpha = p.at("alpha").get<double>();
    c.params.beta_ratio = p.at("beta_ratio").get<double>();
    c.params.alpha0 = p.at("alpha0").get<double>();
    c.params.eta = p.at("eta").get<double>();
    c.params.r_p = p.at("r_p").get<double>();
    c.params.r_q = p.at("r_q").get<double>();
    c.params.r_z = p.at("r_z").get<double>();
    c.params.inner_iters = p.at("inner_iters").get<int>();
    c.params.outer_tol = p.at("outer_tol").get<double>();
    c.params.max_outer = p.at("max_outer").get<int>();
    c.params.rng_seed = p.at("seed").get<std::uint64_t>();
    c.params.fallback_alpha = p.at("fallback_alpha").get<double>();
    c.params.direct_limit = p.at("direct_limit").get<Index>();
    c.ring = parse_ring(p.at("ring").get<std::string>());
    c.ground_truth_paths = p.at("ground_truth").get<std::vector<std::string>>();
    return c;
  } catch (const json::exception& e) {
    throw FormatError(0, report_path + ": malformed report: " + e.what());
  }
}

}  // namespace msseg
