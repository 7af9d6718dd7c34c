#include "msseg/error.hpp"
#include "msseg/eval.hpp"
#include "msseg/pipeline.hpp"
#include "msseg/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return code;
}

void apply_thread_cap() {
  if (const char* env = std::getenv("MSSEG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) Eigen::setNbThreads(n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace msseg;
  CLI::App app{"Variational mesh segmentation"};
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");

  RunConfig cfg;
  std::string mode = "gpsms", alpha = "auto", ring = "n2", replay;
  app.add_option("--mesh", cfg.mesh_path, "Input mesh (.off or .obj)");
  app.add_option("--mode", mode, "pcms | psms | gpsms")->capture_default_str();
  app.add_option("--k", cfg.params.K, "Number of segments")->capture_default_str();
  app.add_option("--alpha", alpha, "Data weight, or 'auto'")->capture_default_str();
  app.add_option("--beta-ratio", cfg.params.beta_ratio, "beta / alpha")->capture_default_str();
  app.add_option("--alpha0", cfg.params.alpha0, "Second-order weight")->capture_default_str();
  app.add_option("--eta", cfg.params.eta)->capture_default_str();
  app.add_option("--rp", cfg.params.r_p)->capture_default_str();
  app.add_option("--rq", cfg.params.r_q)->capture_default_str();
  app.add_option("--rz", cfg.params.r_z)->capture_default_str();
  app.add_option("--inner-iters", cfg.params.inner_iters)->capture_default_str();
  app.add_option("--tol", cfg.params.outer_tol, "Outer stopping threshold")->capture_default_str();
  app.add_option("--max-outer", cfg.params.max_outer)->capture_default_str();
  app.add_option("--seed", cfg.params.rng_seed)->capture_default_str();
  app.add_option("--ring", ring, "Normal smoothing ring: face | n1 | n2")->capture_default_str();
  app.add_option("--gt", cfg.ground_truth_paths, "Ground-truth .seg (repeatable)");
  app.add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();
  app.add_flag("--features", cfg.write_features, "Also write the feature field");
  app.add_option("--replay", replay, "Rerun the configuration stored in a report");

  auto* score = app.add_subcommand("score", "Rand-index dissimilarity of a labeling against ground truths");
  std::string seg_path, mesh_id, method = "msseg";
  std::vector<std::string> truths;
  int score_k = 0;
  score->add_option("seg", seg_path, "Labeling to score")->required();
  score->add_option("--gt", truths, "Ground-truth .seg (repeatable)")->required();
  score->add_option("--id", mesh_id, "Mesh id for the CSV row");
  score->add_option("--method", method)->capture_default_str();
  score->add_option("--k", score_k, "K column value; defaults to the number of distinct labels");
  bool header = false;
  score->add_flag("--header", header, "Print the CSV header first");

  auto* synth = app.add_subcommand("synth", "Write a synthetic test mesh (and ground truth where defined)");
  std::string shape = "dumbbell", synth_out;
  synth->add_option("shape", shape, "dumbbell | sphere | blob")->capture_default_str();
  synth->add_option("--out", synth_out, "Output .off path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("parameter", e.what(), 2);
  }

  apply_thread_cap();
  try {
    if (*score) {
      FaceLabeling a = load_seg_file(seg_path);
      std::vector<FaceLabeling> gts;
      for (const auto& t : truths) gts.push_back(load_seg_file(t));
      if (score_k <= 0) score_k = static_cast<int>(std::set<long>(a.labels.begin(), a.labels.end()).size());
      if (header) write_score_header(std::cout);
      write_score_row(std::cout, {mesh_id.empty() ? std::filesystem::path(seg_path).stem().string() : mesh_id,
                                  method, score_k, rand_index_dissimilarity(a, gts)});
      return 0;
    }
    if (*synth) {
      TriMesh mesh = shape == "dumbbell" ? make_dumbbell()
                     : shape == "sphere" ? make_uv_sphere(24, 20)
                     : shape == "blob"   ? make_blob()
                                         : throw ParameterError("unknown shape '" + shape + "'");
      std::ofstream out(synth_out);
      if (!out) throw IoError(synth_out, "cannot open for writing");
      write_off(out, mesh);
      if (shape == "dumbbell") {
        const auto gt_path = std::filesystem::path(synth_out).replace_extension(".seg").string();
        std::ofstream gt(gt_path);
        if (!gt) throw IoError(gt_path, "cannot open for writing");
        write_seg(gt, dumbbell_ground_truth(mesh));
      }
      std::cout << synth_out << ": " << mesh.num_faces() << " faces\n";
      return 0;
    }

    if (!replay.empty()) {
      const std::string out_dir = cfg.output_dir;
      const bool out_given = app.count("--out") > 0;
      cfg = config_from_report(replay);
      if (out_given) cfg.output_dir = out_dir;
    } else {
      cfg.params.mode = parse_mode(mode);
      cfg.ring = parse_ring(ring);
      if (alpha != "auto") {
        try {
          std::size_t used = 0;
          cfg.params.alpha = std::stod(alpha, &used);
          if (used != alpha.size()) throw std::invalid_argument(alpha);
        } catch (const std::logic_error&) {
          throw ParameterError("--alpha must be a number or 'auto', got '" + alpha + "'");
        }
      }
    }

    const RunOutcome outcome = run(cfg);
    const auto& res = outcome.result;
    std::cout << "mode=" << to_string(cfg.params.mode) << " K=" << cfg.params.K << " alpha=" << res.alpha
              << " outer=" << res.records.size() << " converged=" << (res.converged ? "true" : "false")
              << " seconds=" << res.seconds;
    if (outcome.rand_index) std::cout << " rand_index=" << *outcome.rand_index;
    std::cout << "\n" << outcome.seg_path << "\n" << outcome.ply_path << "\n" << outcome.report_path << "\n";
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
  } catch (const msseg::Error& e) {
    return fail(to_string(e.kind()), e.what(), e.kind() == ErrorKind::Parameter ? 2 : 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}
