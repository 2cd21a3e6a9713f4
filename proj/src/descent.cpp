#include "congeo/descent.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "congeo/rng.hpp"

namespace congeo {

namespace {

constexpr double kGapConverged = 1e-6;
constexpr double kPlateauRel = 1e-10;
constexpr int kPlateauWindow = 200;  // accepted steps per plateau check
constexpr int kMaxDecays = 3;
constexpr int kMaxHalvings = 30;
constexpr int kCheckpointEvery = 200;
constexpr double kEtaCap = 1e12;

void project(Eigen::MatrixXd& Z, Constraint constraint,
             SimilaritySpec::Kind kind) {
  if (constraint == Constraint::unit_sphere) {
    for (int i = 0; i < Z.rows(); ++i) {
      const double nrm = Z.row(i).norm();
      require(nrm > 0.0, ErrorCode::ZeroVector, "iterate row collapsed to 0");
      Z.row(i) /= nrm;
    }
  } else if (kind == SimilaritySpec::Kind::Euclidean) {
    // translation gauge: keep the centroid at the origin
    Z.rowwise() -= Z.colwise().mean().eval();
  }
}

double gap_of(double loss, double bound) {
  if (bound > 0.0) return std::max(loss / bound - 1.0, 0.0);
  return std::max(loss - bound, 0.0);
}

DescentTrace run_restart(const Eigen::MatrixXd& P, double bound,
                         const SimilaritySpec& spec, int n, int q,
                         const DescentConfig& cfg, int restart) {
  Rng rng(cfg.seed + static_cast<std::uint64_t>(restart));
  Embedding Z(cfg.init_scale * rng.gaussian(n, q));
  project(Z.z, cfg.constraint, spec.kind);

  LossGrad ev = detail::loss_grad_from_pairs(P, Z, spec);

  DescentTrace trace;
  trace.restart = restart;
  trace.ratio_undefined = bound <= 0.0;

  double eta = cfg.step_size;
  int decays = 0;
  int window = 0;
  int accepted = 0;
  double window_loss = ev.loss;
  double grad_norm = 0.0;
  int it = 0;

  auto riemannian_grad = [&](const LossGrad& e) {
    Eigen::MatrixXd g = e.grad;
    if (cfg.constraint == Constraint::unit_sphere)
      for (int i = 0; i < n; ++i)
        g.row(i) -= g.row(i).dot(Z.z.row(i)) * Z.z.row(i);
    return g;
  };

  Eigen::MatrixXd g = riemannian_grad(ev);
  grad_norm = g.norm();
  trace.checkpoints.push_back({0, ev.loss, gap_of(ev.loss, bound), grad_norm});

  for (it = 0; it < cfg.steps; ++it) {
    if (grad_norm <= cfg.stop_grad_norm) break;

    double t = eta;
    bool ok = false;
    Embedding cand;
    LossGrad cev;
    for (int h = 0; h < kMaxHalvings + 1; ++h) {
      cand.z = Z.z - t * g;
      project(cand.z, cfg.constraint, spec.kind);
      cev = detail::loss_grad_from_pairs(P, cand, spec);
      if (cev.loss < ev.loss) {
        ok = true;
        break;
      }
      t /= 2.0;
    }
    if (!ok) {
      eta *= cfg.decay;
      if (++decays >= kMaxDecays) break;
      continue;
    }
    Z.z.swap(cand.z);
    ev = std::move(cev);
    g = riemannian_grad(ev);
    grad_norm = g.norm();
    eta = std::min(t * 2.0, kEtaCap);
    ++accepted;
    if (accepted % kCheckpointEvery == 0)
      trace.checkpoints.push_back(
          {it + 1, ev.loss, gap_of(ev.loss, bound), grad_norm});
    if (++window >= kPlateauWindow) {
      const double improvement = window_loss - ev.loss;
      if (improvement <= kPlateauRel * std::max(1.0, std::abs(window_loss))) {
        eta *= cfg.decay;
        if (++decays >= kMaxDecays) break;
      } else {
        decays = 0;
      }
      window_loss = ev.loss;
      window = 0;
    }
  }

  trace.final_embedding = std::move(Z);
  trace.loss = ev.loss;
  trace.gap = gap_of(ev.loss, bound);
  trace.grad_norm = grad_norm;
  trace.accepted_steps = accepted;
  trace.converged =
      grad_norm <= cfg.stop_grad_norm || trace.gap <= kGapConverged;
  if (trace.checkpoints.empty() || trace.checkpoints.back().loss != ev.loss)
    trace.checkpoints.push_back({it, ev.loss, trace.gap, grad_norm});
  return trace;
}

}  // namespace

DescentTrace minimize(const WeightMatrix& W, const SimilaritySpec& spec, int q,
                      const DescentConfig& cfg, int threads) {
  require(q >= 1, ErrorCode::BadConfig, "q must be >= 1");
  require(cfg.steps >= 1, ErrorCode::BadConfig, "steps must be >= 1");
  require(cfg.step_size > 0.0, ErrorCode::BadConfig,
          "step_size must be positive");
  require(cfg.decay > 0.0 && cfg.decay <= 1.0, ErrorCode::BadConfig,
          "decay must lie in (0, 1]");
  require(cfg.restarts >= 1, ErrorCode::BadConfig, "restarts must be >= 1");
  require(cfg.init_scale > 0.0, ErrorCode::BadConfig,
          "init_scale must be positive");
  require(cfg.stop_grad_norm > 0.0, ErrorCode::BadConfig,
          "stop_grad_norm must be positive");
  if (spec.kind == SimilaritySpec::Kind::Spherical)
    require(spec.tau > 0.0, ErrorCode::BadConfig, "tau must be positive");

  const Eigen::MatrixXd P = pair_distribution(W);
  const double bound = detail::bound_from_pairs(P);
  const int n = W.n();

  std::vector<DescentTrace> traces(cfg.restarts);
  const int nthreads =
      std::max(1, std::min(threads, cfg.restarts));
  if (nthreads == 1) {
    for (int r = 0; r < cfg.restarts; ++r)
      traces[r] = run_restart(P, bound, spec, n, q, cfg, r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t]() {
        try {
          for (int r = t; r < cfg.restarts; r += nthreads)
            traces[r] = run_restart(P, bound, spec, n, q, cfg, r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  int best = 0;
  for (int r = 1; r < cfg.restarts; ++r)
    if (traces[r].loss < traces[best].loss) best = r;
  return std::move(traces[best]);
}

}  // namespace congeo
