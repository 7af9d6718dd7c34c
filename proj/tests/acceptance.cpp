// One PASS/FAIL line per acceptance criterion. Criteria listed with
// --known-failure are still evaluated and printed but do not change the exit
// status.

#include "msseg/calculus.hpp"
#include "msseg/eval.hpp"
#include "msseg/features.hpp"
#include "msseg/prox.hpp"
#include "msseg/solver.hpp"
#include "msseg/synthetic.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace msseg;
using namespace msseg::testing;

namespace {

// Tolerances and budgets.
constexpr double kAdjointTol = 1e-10;
constexpr double kAdjointSeconds = 5.0;
constexpr double kProxTol = 1e-6;
constexpr double kSimplexTol = 1e-6;
constexpr double kFeasibleTol = 1e-12;
constexpr double kStationarityTol = 1e-4;
constexpr double kSweepTol = 1e-12;
constexpr double kMuTol = 1e-8;
constexpr double kStopTol = 1e-5;
constexpr double kKktTol = 1e-3;
constexpr double kDumbbellSeconds = 60.0;
constexpr double kRandIndexBound = 2.0;
constexpr double kAlphaExpected = 200.0;
constexpr double kAlphaTol = 1e-12;
constexpr double kEigenResidualTol = 1e-8;
constexpr double kFiedlerCosine = 1.0 - 1e-8;
constexpr double kRandIndexTol = 1e-10;
constexpr double kThroughputSeconds = 24.0;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

FaceLabeling to_labeling(const Eigen::VectorXi& labels) {
  FaceLabeling l;
  l.labels.assign(labels.data(), labels.data() + labels.size());
  return l;
}

Verdict operator_adjointness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  Index smallest = 1 << 30, largest = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const TriMesh m = make_random_closed_mesh(1000 + i, 2000);
    smallest = std::min(smallest, m.num_faces());
    largest = std::max(largest, m.num_faces());
    const int K = 1 + static_cast<int>(i % 4);
    const Eigen::MatrixXd u = random_matrix(rng, m.num_faces(), K), p = random_matrix(rng, m.num_edges(), K);
    const double gp = inner_V(m, gradient(m, u), p);
    const double ud = inner_U(m, u, divergence(m, p));
    worst = std::max(worst, std::abs(gp + ud) / (1.0 + std::abs(gp)));
  }
  const double t = seconds_since(t0);
  return {worst <= kAdjointTol && t < kAdjointSeconds && smallest >= 4 && largest <= 2000,
          fmt("worst scaled gap %.2e, %.2f s", worst, t) + ", faces " + std::to_string(smallest) + ".." +
              std::to_string(largest)};
}

Verdict prox_oracles() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> param(0.1, 5.0);
  std::uniform_int_distribution<int> width(1, 6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::RowVectorXd w = random_matrix(rng, 1, width(rng), 3.0);
    const double r_p = param(rng), r_q = param(rng), alpha0 = param(rng);
    worst = std::max(worst, (prox_p(w, r_p) - oracle::numeric_prox(w, 1.0, r_p)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (prox_q(w, r_q, alpha0) - oracle::numeric_prox(w, alpha0, r_q)).cwiseAbs().maxCoeff());
  }
  return {worst <= kProxTol, fmt("2000 rows, worst deviation %.2e", worst)};
}

Verdict simplex_projection() {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> dim(1, 6);
  double oracle_gap = 0.0, idempotence = 0.0, infeasible = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd y = random_matrix(rng, dim(rng), 1, 2.0);
    const Eigen::VectorXd x = project_simplex(y);
    oracle_gap = std::max(oracle_gap, (x - oracle::simplex_by_supports(y)).cwiseAbs().maxCoeff());
    idempotence = std::max(idempotence, (project_simplex(x) - x).cwiseAbs().maxCoeff());
    infeasible = std::max({infeasible, std::abs(x.sum() - 1.0), std::max(0.0, -x.minCoeff())});
  }
  return {oracle_gap <= kSimplexTol && idempotence <= kFeasibleTol && infeasible <= kFeasibleTol,
          fmt("oracle %.2e, idempotence %.2e, feasibility %.2e", oracle_gap, idempotence, infeasible)};
}

Verdict subproblem_stationarity() {
  std::mt19937_64 rng(104);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const TriMesh m = trial % 2 ? make_random_closed_mesh(400 + trial, 80) : make_grid_patch(3, 2, 0.3, trial);
    const int K = 2 + trial % 3;
    SolverParams p;
    p.K = K;
    p.r_p = 0.5 + 0.25 * trial;
    p.r_q = 1.5;
    p.r_z = 10.0;
    const double alpha = 4.0, beta = 2.0;
    const SolverWorkspace ws(m, p, alpha, beta);
    SolverState st = random_state(rng, m, K);
    const FaceField f = random_matrix(rng, m.num_faces(), K - 1);

    const FaceField u = solve_u(st, p, ws);
    auto Ju = [&](const Eigen::MatrixXd& x) { return u_objective(m, st, p, x); };
    worst = std::max(worst, fd_gradient(Ju, u).norm() / (1.0 + std::abs(Ju(u))));

    st.u = u;
    const EdgeField v = solve_v(st, p, ws);
    auto Jv = [&](const Eigen::MatrixXd& x) { return v_objective(m, st, p, x); };
    worst = std::max(worst, fd_gradient(Jv, v).norm() / (1.0 + std::abs(Jv(v))));

    const FaceField b = solve_b(st, p, ws, f);
    auto Jb = [&](const Eigen::MatrixXd& x) { return b_objective(m, st, p, alpha, beta, f, x); };
    worst = std::max(worst, fd_gradient(Jb, b).norm() / (1.0 + std::abs(Jb(b))));
  }
  return {worst <= kStationarityTol, fmt("20 instances, worst scaled gradient %.2e", worst)};
}

Verdict transliteration() {
  std::mt19937_64 rng(105);
  const TriMesh m = two_face_mesh();
  SolverParams p;
  p.K = 2;
  p.r_p = 1.3;
  p.r_q = 0.7;
  p.r_z = 5.0;
  p.alpha0 = 0.4;
  const double alpha = 3.0, beta = 1.5;
  const SolverWorkspace ws(m, p, alpha, beta);
  const SolverState st = random_state(rng, m, 2);
  const FaceField f = random_matrix(rng, 2, 1);
  const SolverState ref = oracle::reference_sweep(m, st, p, alpha, beta, f);
  SolverState got = st;
  admm_sweep(got, p, ws, f);
  const double worst = std::max({max_abs(got.u - ref.u), max_abs(got.z - ref.z), max_abs(got.b - ref.b),
                                 max_abs(got.v - ref.v), max_abs(got.p - ref.p), max_abs(got.q - ref.q),
                                 max_abs(got.lambda_p - ref.lambda_p), max_abs(got.lambda_q - ref.lambda_q),
                                 max_abs(got.lambda_z - ref.lambda_z)});
  return {worst <= kSweepTol, fmt("worst component deviation %.2e", worst)};
}

Verdict mu_update() {
  std::mt19937_64 rng(106);
  const TriMesh m = five_face_mesh();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 2 + trial % 3;
    const FaceField u = random_labels(rng, 5, K);
    const FaceField f = random_matrix(rng, 5, K - 1), b = random_matrix(rng, 5, K - 1, 0.2);
    const Eigen::MatrixXd mu = update_mu(m, u, b, f, Eigen::MatrixXd::Zero(K, K - 1));
    worst = std::max(worst, max_abs(mu - oracle::mu_least_squares(m, u, b, f)));
  }
  return {worst <= kMuTol, fmt("100 instances, worst deviation %.2e", worst)};
}

struct DumbbellRun {
  TriMesh mesh;
  FeatureField features;
  FaceLabeling truth;
};

const DumbbellRun& dumbbell() {
  static const DumbbellRun run = [] {
    TriMesh m = make_dumbbell();
    FeatureField ff = feature_field(m, 2);
    FaceLabeling gt = dumbbell_ground_truth(m);
    return DumbbellRun{std::move(m), std::move(ff), std::move(gt)};
  }();
  return run;
}

Verdict convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const DumbbellRun& d = dumbbell();
  SolverParams p;
  p.K = 2;
  const SegmentationResult r = amm_outer(d.mesh, d.features.values, p);
  const double t = seconds_since(t0);
  const double last = r.error_trace.empty() ? INFINITY : r.error_trace.back();
  const double primal = r.kkt.max_primal();
  return {r.converged && last < kStopTol && r.records.size() <= 100 && primal <= kKktTol && t < kDumbbellSeconds,
          std::to_string(d.mesh.num_faces()) + " faces, " + std::to_string(r.records.size()) + " outer, " +
              fmt("final error %.2e, primal KKT %.2e, %.1f s", last, primal, t)};
}

Verdict segmentation() {
  const DumbbellRun& d = dumbbell();
  std::string detail;
  bool pass = true;
  for (Mode mode : {Mode::PSMS, Mode::GPSMS}) {
    SolverParams p;
    p.K = 2;
    p.mode = mode;
    const SegmentationResult r = amm_outer(d.mesh, d.features.values, p);
    const double ri = rand_index_dissimilarity(to_labeling(r.labels), d.truth);
    const std::set<int> present(r.labels.data(), r.labels.data() + r.labels.size());
    pass = pass && ri < kRandIndexBound && present.size() == 2;
    detail += std::string(detail.empty() ? "" : ", ") + to_string(mode) + fmt(" RI %.4f", ri);
  }
  return {pass, detail};
}

Verdict mode_degeneracy() {
  const DumbbellRun& d = dumbbell();
  SolverParams psms;
  psms.K = 2;
  psms.mode = Mode::PSMS;
  psms.max_outer = 10;
  psms.outer_tol = 1e-300;
  SolverParams frozen = psms;
  frozen.mode = Mode::GPSMS;
  frozen.freeze_v = true;
  frozen.disable_q = true;
  const SegmentationResult a = amm_outer(d.mesh, d.features.values, psms);
  const SegmentationResult b = amm_outer(d.mesh, d.features.values, frozen);
  const bool same = a.u == b.u && a.b == b.b && a.mu == b.mu && a.labels == b.labels &&
                    a.error_trace == b.error_trace && a.records.size() == 10 && b.records.size() == 10;
  return {same, same ? "u, b, mu, labels and error trace identical over 10 outer iterations"
                     : fmt("max u difference %.2e", max_abs(a.u - b.u))};
}

Verdict alpha_estimate() {
  const TriMesh m = two_face_mesh();
  FaceField u(2, 2);
  u << 1, 0, 0, 1;
  FaceField f(2, 1);
  f << 0, 1;
  Eigen::MatrixXd mu(2, 1);
  mu << 0.1, 0.9;
  const AlphaEstimate a = estimate_alpha(m, f, u, FaceField::Zero(2, 1), mu, 2, Mode::GPSMS);
  return {!a.fallback && std::abs(a.value - kAlphaExpected) <= kAlphaTol * kAlphaExpected,
          fmt("alpha %.12g, expected %.12g (TV over both label channels is %.3g)", a.value, kAlphaExpected,
              a.numerator / (2.0 * 2.0))};
}

Verdict eigen_contract() {
  std::vector<TriMesh> meshes;
  meshes.push_back(make_dumbbell());
  meshes.push_back(make_blob(40, 24));
  meshes.push_back(make_grid_patch(12, 10, 0.2, 4));
  meshes.push_back(make_subdivided_tetrahedron(3));
  meshes.push_back(make_uv_sphere(20, 12));
  double worst = 0.0;
  for (const TriMesh& m : meshes) {
    for (int K : {2, 4, 9}) {
      const FeatureField ff = feature_field(m, K);
      const SparseSym L = build_laplacian(m);
      for (Index c = 0; c < ff.values.cols(); ++c) {
        const Eigen::VectorXd x = ff.values.col(c);
        worst = std::max(worst, (L * x - ff.eigenvalues(c) * x).norm() / x.norm());
      }
    }
  }
  const FeatureField strip = feature_field(equilateral_strip(), 2);
  const Eigen::Vector3d fiedler(1, 0, -1);
  const Eigen::VectorXd x = strip.values.col(0);
  const double cosine = std::abs(x.dot(fiedler)) / (x.norm() * fiedler.norm());
  return {worst <= kEigenResidualTol && cosine > kFiedlerCosine,
          fmt("worst relative residual %.2e, path cosine 1 - %.2e", worst, 1.0 - cosine)};
}

Verdict rand_index() {
  std::mt19937_64 rng(112);
  std::uniform_int_distribution<int> size(2, 200);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    std::uniform_int_distribution<int> la(0, 1 + trial % 7), lb(0, 1 + trial % 5);
    FaceLabeling a, b;
    for (int i = 0; i < n; ++i) {
      a.labels.push_back(la(rng));
      b.labels.push_back(lb(rng));
    }
    worst = std::max(worst, std::abs(rand_index_dissimilarity(a, b) - oracle::rand_index_brute(a, b)));
  }
  const double worked =
      rand_index_dissimilarity(FaceLabeling{{0, 0, 1, 1}}, FaceLabeling{{0, 1, 0, 1}});
  return {worst <= kRandIndexTol && std::abs(worked - 66.67) <= 0.01,
          fmt("200 pairs, worst deviation %.2e, worked case %.4f", worst, worked)};
}

Verdict throughput() {
  const TriMesh m = make_blob();
  const auto t0 = std::chrono::steady_clock::now();
  const FeatureField ff = feature_field(m, 9);
  SolverParams p;
  p.K = 9;
  const SegmentationResult r = amm_outer(m, ff.values, p);
  const double t = seconds_since(t0);
  return {t <= kThroughputSeconds, std::to_string(m.num_faces()) + " faces, K=9, " +
                                       std::to_string(r.records.size()) + " outer" +
                                       (r.converged ? "" : " (not converged)") + fmt(", %.1f s", t)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> known;
  app.add_option("--known-failure", known, "Criterion expected to fail; reported but not fatal");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> expected_fail(known.begin(), known.end());

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"operator adjointness", operator_adjointness},
      {"prox oracles", prox_oracles},
      {"simplex projection", simplex_projection},
      {"subproblem stationarity", subproblem_stationarity},
      {"sweep transliteration", transliteration},
      {"mean update", mu_update},
      {"dumbbell convergence", convergence},
      {"dumbbell segmentation", segmentation},
      {"mode degeneracy", mode_degeneracy},
      {"two-face alpha", alpha_estimate},
      {"eigenvector contract", eigen_contract},
      {"rand index", rand_index},
      {"throughput", throughput},
  };

  int unexpected = 0;
  std::vector<int> failed_known;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) {
      if (expected_fail.count(id)) failed_known.push_back(id);
      else ++unexpected;
    }
  }
  std::printf("%d unexpected failure(s)", unexpected);
  if (!failed_known.empty()) {
    std::printf("; known failure(s):");
    for (int id : failed_known) std::printf(" %d", id);
  }
  std::printf("\n");
  return unexpected == 0 ? 0 : 1;
}
