#ifndef MSSEG_SOLVER_HPP
#define MSSEG_SOLVER_HPP

#include "msseg/calculus.hpp"
#include "msseg/linear_solver.hpp"
#include "msseg/mesh.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace msseg {

/// PCMS: piecewise constant, TV regularizer, b fixed at zero.
/// PSMS: piecewise smooth, TV regularizer.
/// GPSMS: piecewise smooth, relaxed second-order regularizer.
enum class Mode { PCMS, PSMS, GPSMS };

const char* to_string(Mode mode);
Mode parse_mode(std::string_view name);

struct SolverParams {
  int K = 2;
  Mode mode = Mode::GPSMS;
  /// Unset means estimate from the initial labeling.
  std::optional<double> alpha;
  /// beta = beta_ratio * alpha.
  double beta_ratio = 1.0;
  double alpha0 = 2.0;
  double eta = 1e-5;
  double r_p = 1.0;
  double r_q = 1.0;
  double r_z = 100.0;
  int inner_iters = 5;
  double outer_tol = 1e-5;
  int max_outer = 100;
  std::uint64_t rng_seed = 0;
  /// Used when the alpha estimate is undefined (zero numerator or denominator).
  double fallback_alpha = 1.0;

  // Diagnostic switches (GPSMS only): keep v at zero, skip the q / lambda_q updates.
  bool freeze_v = false;
  bool disable_q = false;

  /// Systems larger than this use conjugate gradients instead of LDLT.
  Index direct_limit = SpdSolver::kDefaultDirectLimit;

  /// Throws ParameterError on any invariant violation.
  void validate() const;

  bool updates_v() const { return mode == Mode::GPSMS && !freeze_v; }
  bool updates_q() const { return mode == Mode::GPSMS && !disable_q; }
  bool updates_b() const { return mode != Mode::PCMS; }
};

/// Complete ADMM state. Edge fields live on the interior edges (boundary rows
/// stay zero).
struct SolverState {
  FaceField u, z;        // |T| x K
  FaceField b;           // |T| x (K-1)
  EdgeField v, p, lambda_p;  // |E| x K
  FaceField q, lambda_q, lambda_z;  // |T| x K
  Eigen::MatrixXd mu;    // K x (K-1)
  int outer_iteration = 0;

  static SolverState zeros(Index faces, Index edges, int K);
};

/// Named scalar diagnostics in a fixed order.
struct KktResiduals {
  std::vector<std::pair<std::string, double>> entries;

  /// Throws PreconditionError for unknown names.
  double at(std::string_view name) const;
  bool contains(std::string_view name) const;
  /// Largest of the primal feasibility residuals present.
  double max_primal() const;
};

/// Precomputed operators and factored systems for one (mesh, parameter) pair.
/// The matrices are constant across iterations, so every linear solve after
/// construction is a pair of triangular solves.
class SolverWorkspace {
 public:
  SolverWorkspace(const TriMesh& mesh, const SolverParams& params, double alpha, double beta);

  const TriMesh& mesh() const { return *mesh_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  EdgeField grad(const FaceField& u) const { return G_ * u; }
  /// -grad^*, the divergence restricted to interior edges.
  FaceField div(const EdgeField& p) const { return div_ * p; }
  FaceField lap(const FaceField& b) const { return div_ * (G_ * b); }

  const SparseMatrix& gradient_op() const { return G_; }
  const SparseMatrix& weighted_gradient_transpose() const { return GtL_; }
  const SpdSolver& u_system() const { return u_solver_; }
  const SpdSolver& v_system() const { return v_solver_; }
  const SpdSolver& b_system() const { return b_solver_; }
  bool has_v_system() const { return has_v_; }
  bool has_b_system() const { return has_b_; }

 private:
  const TriMesh* mesh_;
  double alpha_;
  double beta_;
  SparseMatrix G_;
  SparseMatrix GtL_;
  SparseMatrix div_;
  SpdSolver u_solver_;
  SpdSolver v_solver_;
  SpdSolver b_solver_;
  bool has_v_ = false;
  bool has_b_ = false;
};

struct InitialLabels {
  Eigen::MatrixXd mu;  // K x channels
  FaceField u;         // one-hot, |T| x K
  int attempts = 1;
};

/// Seeded k-means++ with area-weighted centers; every cluster non-empty.
/// Throws InitializationError after 20 failed restarts.
InitialLabels init_labels(const FaceField& f, const Eigen::VectorXd& areas, int K, std::uint64_t seed);

/// s_tk = |f_t - b_t - mu_k|^2, |T| x K.
FaceField similarity(const FaceField& f, const FaceField& b, const Eigen::MatrixXd& mu);

struct AlphaEstimate {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool fallback = false;
  std::string warning;
};

/// alpha = 2 K TV(u0) / <u0, s(f, b0, mu0)>_U, with the configured fallback
/// when either side vanishes.
AlphaEstimate estimate_alpha(const TriMesh& mesh, const FaceField& f, const FaceField& u0, const FaceField& b0,
                             const Eigen::MatrixXd& mu0, int K, Mode mode, double fallback_alpha = 1.0);

/// Closed-form class means. Classes with no mass keep `previous` and append a
/// message to `warnings` when given.
Eigen::MatrixXd update_mu(const TriMesh& mesh, const FaceField& u, const FaceField& b, const FaceField& f,
                          const Eigen::MatrixXd& previous, std::vector<std::string>* warnings = nullptr);

/// Row-wise simplex projection of u - (alpha s + lambda_z) / r_z.
FaceField update_z(const FaceField& u, const FaceField& lambda_z, const FaceField& s, double alpha, double r_z);

FaceField solve_u(const SolverState& state, const SolverParams& params, const SolverWorkspace& ws);
EdgeField solve_v(const SolverState& state, const SolverParams& params, const SolverWorkspace& ws);
FaceField solve_b(const SolverState& state, const SolverParams& params, const SolverWorkspace& ws,
                  const FaceField& f);

/// One sweep in the order z, u, v, b, p, q, multipliers.
void admm_sweep(SolverState& state, const SolverParams& params, const SolverWorkspace& ws, const FaceField& f);
/// params.inner_iters sweeps at fixed mu.
SolverState admm_inner(SolverState state, const SolverParams& params, const SolverWorkspace& ws,
                       const FaceField& f);

KktResiduals kkt_residuals(const SolverState& state, const SolverParams& params, const SolverWorkspace& ws,
                           const FaceField& f);

/// Model energy; the second-order regularizer is evaluated at `v`.
double energy(const TriMesh& mesh, const FaceField& u, const FaceField& b, const Eigen::MatrixXd& mu,
              const FaceField& f, const SolverParams& params, double alpha, double beta, const EdgeField& v);

/// Row-wise argmax, ties to the lowest class index.
Eigen::VectorXi classify(const FaceField& u);

struct OuterRecord {
  int iteration = 0;
  double error = 0.0;   // ||u^{l+1} - u^l||_U^2
  double energy = 0.0;
  KktResiduals kkt;
  double seconds = 0.0; // cumulative
};

struct SegmentationResult {
  Eigen::VectorXi labels;
  FaceField u;
  Eigen::MatrixXd mu;
  FaceField b;
  std::vector<double> error_trace;
  std::vector<double> energy_trace;
  std::vector<OuterRecord> records;
  KktResiduals kkt;
  double seconds = 0.0;
  bool converged = false;
  double alpha = 0.0;
  double beta = 0.0;
  AlphaEstimate alpha_estimate;  // meaningful when alpha was estimated
  bool alpha_estimated = false;
  std::vector<std::string> warnings;
  SolverState final_state;
};

using IterationCallback = std::function<void(const OuterRecord&)>;

/// Alternating minimization: ADMM on (u, b) at fixed mu, then the mu update,
/// until ||u^{l+1} - u^l||_U^2 < outer_tol or max_outer iterations.
SegmentationResult amm_outer(const TriMesh& mesh, const FaceField& f, const SolverParams& params,
                             const IterationCallback& on_iteration = {});

}  // namespace msseg

#endif  // MSSEG_SOLVER_HPP
