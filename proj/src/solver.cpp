#include "msseg/solver.hpp"

#include "msseg/error.hpp"
#include "msseg/prox.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace msseg {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::PCMS: return "pcms";
    case Mode::PSMS: return "psms";
    case Mode::GPSMS: return "gpsms";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "pcms") return Mode::PCMS;
  if (lower == "psms") return Mode::PSMS;
  if (lower == "gpsms") return Mode::GPSMS;
  throw ParameterError("unknown mode '" + std::string(name) + "' (expected pcms, psms or gpsms)");
}

void SolverParams::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError(std::string(name) + " must be positive");
  };
  if (K < 2) throw ParameterError("K must be at least 2");
  if (inner_iters < 1) throw ParameterError("inner_iters must be at least 1");
  if (max_outer < 1) throw ParameterError("max_outer must be at least 1");
  if (alpha) positive(*alpha, "alpha");
  positive(beta_ratio, "beta_ratio");
  positive(alpha0, "alpha0");
  positive(eta, "eta");
  positive(r_p, "r_p");
  positive(r_q, "r_q");
  positive(r_z, "r_z");
  positive(outer_tol, "outer_tol");
  positive(fallback_alpha, "fallback_alpha");
}

SolverState SolverState::zeros(Index faces, Index edges, int K) {
  SolverState s;
  s.u = FaceField::Zero(faces, K);
  s.z = FaceField::Zero(faces, K);
  s.b = FaceField::Zero(faces, K - 1);
  s.v = EdgeField::Zero(edges, K);
  s.p = EdgeField::Zero(edges, K);
  s.lambda_p = EdgeField::Zero(edges, K);
  s.q = FaceField::Zero(faces, K);
  s.lambda_q = FaceField::Zero(faces, K);
  s.lambda_z = FaceField::Zero(faces, K);
  s.mu = Eigen::MatrixXd::Zero(K, K - 1);
  return s;
}

double KktResiduals::at(std::string_view name) const {
  for (const auto& [key, value] : entries) {
    if (key == name) return value;
  }
  throw PreconditionError("no KKT residual named '" + std::string(name) + "'");
}

bool KktResiduals::contains(std::string_view name) const {
  return std::any_of(entries.begin(), entries.end(), [&](const auto& kv) { return kv.first == name; });
}

double KktResiduals::max_primal() const {
  double m = 0.0;
  for (const auto& [key, value] : entries) {
    if (key.rfind("primal_", 0) == 0) m = std::max(m, value);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Workspace

namespace {

SparseMatrix diagonal_matrix(const Eigen::VectorXd& d) {
  SparseMatrix m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Index i = 0; i < d.size(); ++i) m.insert(i, i) = d(i);
  m.makeCompressed();
  return m;
}

}  // namespace

SolverWorkspace::SolverWorkspace(const TriMesh& mesh, const SolverParams& params, double alpha, double beta)
    : mesh_(&mesh), alpha_(alpha), beta_(beta) {
  const Eigen::VectorXd& area = mesh.face_areas();
  const Eigen::VectorXd& len = mesh.edge_lengths();
  const Eigen::VectorXd inv_area = area.cwiseInverse();

  G_ = gradient_matrix(mesh);
  GtL_ = SparseMatrix(G_.transpose()) * len.asDiagonal();
  div_ = -(inv_area.asDiagonal() * GtL_);

  const SparseMatrix area_diag = diagonal_matrix(area);
  const SparseMatrix S = GtL_ * G_;  // grad^T L grad

  u_solver_ = SpdSolver(SparseMatrix(params.r_p * S + params.r_z * area_diag), params.direct_limit);

  if (params.updates_v()) {
    const SparseMatrix LG = len.asDiagonal() * G_;
    const SparseMatrix len_diag = diagonal_matrix(len);
    SparseMatrix H = params.r_q * (LG * inv_area.asDiagonal() * SparseMatrix(LG.transpose())) + params.r_p * len_diag;
    v_solver_ = SpdSolver(std::move(H), params.direct_limit);
    has_v_ = true;
  }
  if (params.updates_b()) {
    SparseMatrix H = beta * (S * inv_area.asDiagonal() * S) + (params.eta + alpha) * area_diag;
    b_solver_ = SpdSolver(std::move(H), params.direct_limit);
    has_b_ = true;
  }
}

// ---------------------------------------------------------------------------
// Initialization

namespace {

Index sample_weighted(const Eigen::VectorXd& weights, std::mt19937_64& rng) {
  const double total = weights.sum();
  std::uniform_real_distribution<double> uniform(0.0, total);
  const double target = uniform(rng);
  double acc = 0.0;
  Index last_positive = -1;
  for (Index i = 0; i < weights.size(); ++i) {
    if (weights(i) <= 0.0) continue;
    acc += weights(i);
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

Index nearest_center(const FaceField& f, Index row, const Eigen::MatrixXd& centers, double* dist = nullptr) {
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < centers.rows(); ++k) {
    const double d = (f.row(row) - centers.row(k)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

bool kmeans_attempt(const FaceField& f, const Eigen::VectorXd& areas, int K, std::mt19937_64& rng,
                    Eigen::MatrixXd& centers, Eigen::VectorXi& assign) {
  const Index n = f.rows();
  centers.resize(K, f.cols());
  centers.row(0) = f.row(sample_weighted(areas, rng));
  Eigen::VectorXd d2(n);
  for (int k = 1; k < K; ++k) {
    for (Index i = 0; i < n; ++i) {
      double d = 0.0;
      nearest_center(f, i, centers.topRows(k), &d);
      d2(i) = areas(i) * d;
    }
    if (!(d2.sum() > 0.0)) return false;
    centers.row(k) = f.row(sample_weighted(d2, rng));
  }

  assign = Eigen::VectorXi::Constant(n, -1);
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      const int k = static_cast<int>(nearest_center(f, i, centers));
      if (k != assign(i)) {
        assign(i) = k;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, f.cols());
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(K);
    for (Index i = 0; i < n; ++i) {
      sums.row(assign(i)) += areas(i) * f.row(i);
      mass(assign(i)) += areas(i);
    }
    for (int k = 0; k < K; ++k) {
      if (!(mass(k) > 0.0)) return false;
      centers.row(k) = sums.row(k) / mass(k);
    }
    if (!changed) break;
  }
  return true;
}

}  // namespace

InitialLabels init_labels(const FaceField& f, const Eigen::VectorXd& areas, int K, std::uint64_t seed) {
  if (K < 2) throw ParameterError("init_labels: K must be at least 2");
  detail::require_rows(areas.size(), f.rows(), "init_labels");
  if (f.rows() < K) throw InitializationError("fewer faces than segments");
  constexpr int kRestarts = 20;
  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
    Eigen::MatrixXd centers;
    Eigen::VectorXi assign;
    if (!kmeans_attempt(f, areas, K, rng, centers, assign)) continue;
    InitialLabels out;
    out.mu = centers;
    out.u = FaceField::Zero(f.rows(), K);
    for (Index i = 0; i < f.rows(); ++i) out.u(i, assign(i)) = 1.0;
    out.attempts = attempt + 1;
    return out;
  }
  throw InitializationError("k-means left a cluster empty after " + std::to_string(kRestarts) + " restarts");
}

// ---------------------------------------------------------------------------
// Data term, alpha, mu

FaceField similarity(const FaceField& f, const FaceField& b, const Eigen::MatrixXd& mu) {
  detail::require_same_shape(f, b, "similarity");
  if (mu.cols() != f.cols()) throw DimensionError("similarity: mu channel count mismatch");
  const FaceField r = f - b;
  FaceField s(f.rows(), mu.rows());
  for (Index k = 0; k < mu.rows(); ++k) {
    s.col(k) = (r.rowwise() - mu.row(k)).rowwise().squaredNorm();
  }
  return s;
}

AlphaEstimate estimate_alpha(const TriMesh& mesh, const FaceField& f, const FaceField& u0, const FaceField& b0,
                             const Eigen::MatrixXd& mu0, int K, Mode mode, double fallback_alpha) {
  detail::require_rows(u0.rows(), mesh.num_faces(), "estimate_alpha");
  if (u0.cols() != K) throw DimensionError("estimate_alpha: u0 must have K columns");
  AlphaEstimate est;
  // rtgv at v = 0 coincides with TV, so every mode uses the same numerator.
  (void)mode;
  est.numerator = 2.0 * K * tv_energy(mesh, u0);
  est.denominator = inner_U(mesh, u0, similarity(f, b0, mu0));
  const double floor = 1e-12 * mesh.face_areas().sum();
  if (!(est.numerator > 0.0) || !(est.denominator > floor)) {
    est.fallback = true;
    est.value = fallback_alpha;
    est.warning = "alpha estimate undefined (numerator " + std::to_string(est.numerator) + ", denominator " +
                  std::to_string(est.denominator) + "); using fallback alpha " + std::to_string(fallback_alpha);
  } else {
    est.value = est.numerator / est.denominator;
  }
  return est;
}

Eigen::MatrixXd update_mu(const TriMesh& mesh, const FaceField& u, const FaceField& b, const FaceField& f,
                          const Eigen::MatrixXd& previous, std::vector<std::string>* warnings) {
  detail::require_rows(u.rows(), mesh.num_faces(), "update_mu");
  detail::require_same_shape(f, b, "update_mu");
  if (previous.rows() != u.cols() || previous.cols() != f.cols()) {
    throw DimensionError("update_mu: previous mu has the wrong shape");
  }
  const Eigen::VectorXd& area = mesh.face_areas();
  const FaceField weights = area.asDiagonal() * u;           // |T| x K
  const Eigen::MatrixXd sums = weights.transpose() * (f - b);  // K x C
  const Eigen::VectorXd mass = weights.colwise().sum().transpose();
  const double floor = 1e-14 * area.sum();
  Eigen::MatrixXd mu = previous;
  for (Index k = 0; k < u.cols(); ++k) {
    if (mass(k) > floor) {
      mu.row(k) = sums.row(k) / mass(k);
    } else if (warnings) {
      warnings->push_back("class " + std::to_string(k) + " has no mass; keeping its previous mean");
    }
  }
  return mu;
}

FaceField update_z(const FaceField& u, const FaceField& lambda_z, const FaceField& s, double alpha, double r_z) {
  detail::require_same_shape(u, lambda_z, "update_z");
  detail::require_same_shape(u, s, "update_z");
  if (!(r_z > 0.0)) throw ParameterError("update_z: r_z must be positive");
  return project_rows_to_simplex(u - (alpha * s + lambda_z) / r_z);
}

// ---------------------------------------------------------------------------
// Quadratic subproblems (Euclidean normal equations of the weighted objectives)

FaceField solve_u(const SolverState& st, const SolverParams& params, const SolverWorkspace& ws) {
  const Eigen::VectorXd& area = ws.mesh().face_areas();
  const FaceField rhs = area.asDiagonal() * (params.r_z * st.z + st.lambda_z) +
                        ws.weighted_gradient_transpose() * (st.lambda_p + params.r_p * (st.p + st.v));
  return ws.u_system().solve(rhs);
}

EdgeField solve_v(const SolverState& st, const SolverParams& params, const SolverWorkspace& ws) {
  if (!ws.has_v_system()) throw PreconditionError("solve_v requires GPSMS mode with v updates enabled");
  const Eigen::VectorXd& len = ws.mesh().edge_lengths();
  const EdgeField LG_part = len.asDiagonal() * ws.grad(st.lambda_q + params.r_q * st.q);
  const EdgeField rhs = -LG_part - len.asDiagonal() * st.lambda_p +
                        params.r_p * (len.asDiagonal() * (ws.grad(st.u) - st.p));
  return ws.v_system().solve(rhs);
}

FaceField solve_b(const SolverState& st, const SolverParams& params, const SolverWorkspace& ws,
                  const FaceField& f) {
  if (!params.updates_b()) return FaceField::Zero(f.rows(), f.cols());
  const Eigen::VectorXd& area = ws.mesh().face_areas();
  const FaceField target = f - st.z * st.mu;
  return ws.b_system().solve(ws.alpha() * (area.asDiagonal() * target));
}

// ---------------------------------------------------------------------------
// ADMM

void admm_sweep(SolverState& st, const SolverParams& params, const SolverWorkspace& ws, const FaceField& f) {
  const FaceField s = similarity(f, st.b, st.mu);
  st.z = update_z(st.u, st.lambda_z, s, ws.alpha(), params.r_z);
  st.u = solve_u(st, params, ws);
  if (params.updates_v()) st.v = solve_v(st, params, ws);
  st.b = solve_b(st, params, ws, f);

  const EdgeField grad_u = ws.grad(st.u);
  st.p = prox_p(grad_u - st.v - st.lambda_p / params.r_p, params.r_p);
  FaceField div_v;
  if (params.updates_q()) {
    div_v = ws.div(st.v);
    st.q = prox_q(div_v - st.lambda_q / params.r_q, params.r_q, params.alpha0);
  }

  st.lambda_p += params.r_p * (st.p + st.v - grad_u);
  if (params.updates_q()) st.lambda_q += params.r_q * (st.q - div_v);
  // Ascent direction matching the (lambda_z, z - u) pairing used by the z and u steps.
  st.lambda_z += params.r_z * (st.z - st.u);
}

SolverState admm_inner(SolverState state, const SolverParams& params, const SolverWorkspace& ws,
                       const FaceField& f) {
  for (int k = 0; k < params.inner_iters; ++k) admm_sweep(state, params, ws, f);
  return state;
}

KktResiduals kkt_residuals(const SolverState& st, const SolverParams& params, const SolverWorkspace& ws,
                           const FaceField& f) {
  const TriMesh& mesh = ws.mesh();
  const bool gpsms = params.mode == Mode::GPSMS;
  KktResiduals out;
  const EdgeField grad_u = ws.grad(st.u);
  out.entries.emplace_back("primal_p", norm_V(mesh, st.p - (grad_u - st.v)));
  if (gpsms) out.entries.emplace_back("primal_q", norm_U(mesh, st.q - ws.div(st.v)));
  out.entries.emplace_back("primal_z", norm_U(mesh, st.z - st.u));
  out.entries.emplace_back("dual_u", norm_U(mesh, ws.div(st.lambda_p) - st.lambda_z));
  if (gpsms) out.entries.emplace_back("dual_v", norm_V(mesh, st.lambda_p + ws.grad(st.lambda_q)));
  if (params.mode != Mode::PCMS) {
    const FaceField lap_b = ws.lap(st.b);
    const FaceField r = ws.beta() * ws.lap(lap_b) + (params.eta + ws.alpha()) * st.b - ws.alpha() * (f - st.z * st.mu);
    out.entries.emplace_back("stationarity_b", norm_U(mesh, r));
  }
  const FaceField weights = mesh.face_areas().asDiagonal() * st.u;
  const Eigen::VectorXd mass = weights.colwise().sum().transpose();
  const Eigen::MatrixXd mu_res = mass.asDiagonal() * st.mu - weights.transpose() * (f - st.b);
  out.entries.emplace_back("stationarity_mu", mu_res.norm());
  return out;
}

double energy(const TriMesh& mesh, const FaceField& u, const FaceField& b, const Eigen::MatrixXd& mu,
              const FaceField& f, const SolverParams& params, double alpha, double beta, const EdgeField& v) {
  const double reg = params.mode == Mode::GPSMS ? rtgv_value(mesh, u, v, params.alpha0) : tv_energy(mesh, u);
  const FaceField lap_b = laplacian(mesh, b);
  return reg + 0.5 * beta * inner_U(mesh, lap_b, lap_b) + 0.5 * params.eta * inner_U(mesh, b, b) +
         0.5 * alpha * inner_U(mesh, u, similarity(f, b, mu));
}

Eigen::VectorXi classify(const FaceField& u) {
  Eigen::VectorXi labels(u.rows());
  for (Index r = 0; r < u.rows(); ++r) {
    Index best = 0;
    for (Index k = 1; k < u.cols(); ++k) {
      if (u(r, k) > u(r, best)) best = k;
    }
    labels(r) = static_cast<int>(best);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Outer loop

SegmentationResult amm_outer(const TriMesh& mesh, const FaceField& f, const SolverParams& params,
                             const IterationCallback& on_iteration) {
  params.validate();
  detail::require_rows(f.rows(), mesh.num_faces(), "amm_outer");
  if (f.cols() != params.K - 1) throw DimensionError("amm_outer: feature field must have K-1 channels");
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  SegmentationResult result;
  const InitialLabels init = init_labels(f, mesh.face_areas(), params.K, params.rng_seed);
  SolverState st = SolverState::zeros(mesh.num_faces(), mesh.num_edges(), params.K);
  st.u = init.u;
  st.mu = init.mu;

  if (params.alpha) {
    result.alpha = *params.alpha;
  } else {
    result.alpha_estimate = estimate_alpha(mesh, f, st.u, st.b, st.mu, params.K, params.mode, params.fallback_alpha);
    result.alpha_estimated = true;
    result.alpha = result.alpha_estimate.value;
    if (result.alpha_estimate.fallback) result.warnings.push_back(result.alpha_estimate.warning);
  }
  result.beta = params.beta_ratio * result.alpha;
  const SolverWorkspace ws(mesh, params, result.alpha, result.beta);

  for (int l = 0; l < params.max_outer; ++l) {
    const FaceField u_prev = st.u;
    st = admm_inner(std::move(st), params, ws, f);
    st.mu = update_mu(mesh, st.u, st.b, f, st.mu, &result.warnings);
    st.outer_iteration = l + 1;

    OuterRecord rec;
    rec.iteration = l + 1;
    const FaceField du = st.u - u_prev;
    rec.error = inner_U(mesh, du, du);
    rec.energy = energy(mesh, st.u, st.b, st.mu, f, params, result.alpha, result.beta, st.v);
    rec.kkt = kkt_residuals(st, params, ws, f);
    rec.seconds = elapsed();
    result.error_trace.push_back(rec.error);
    result.energy_trace.push_back(rec.energy);
    result.records.push_back(rec);
    if (on_iteration) on_iteration(rec);
    if (rec.error < params.outer_tol) {
      result.converged = true;
      break;
    }
  }

  result.labels = classify(st.u);
  result.u = st.u;
  result.mu = st.mu;
  result.b = st.b;
  result.kkt = result.records.empty() ? KktResiduals{} : result.records.back().kkt;
  result.final_state = std::move(st);
  result.seconds = elapsed();
  return result;
}

}  // namespace msseg
