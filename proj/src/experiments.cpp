#include "congeo/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "congeo/distgeo.hpp"
#include "congeo/io.hpp"
#include "congeo/optima.hpp"
#include "congeo/rng.hpp"
#include "congeo/weights.hpp"

namespace congeo {

namespace fs = std::filesystem;

namespace {

Eigen::MatrixXd normalized_rows(const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd Zh(Z.rows(), Z.cols());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const double nrm = Z.row(i).norm();
    require(nrm > 0.0, ErrorCode::ZeroVector, "zero row");
    Zh.row(i) = Z.row(i) / nrm;
  }
  return Zh;
}

struct OutputDirs {
  fs::path root, tables, heatmaps;
};

OutputDirs prepare_dirs(const ExperimentConfig& cfg) {
  OutputDirs d;
  d.root = cfg.out_dir;
  d.tables = d.root / "tables";
  d.heatmaps = d.root / "heatmaps";
  std::error_code ec;
  fs::create_directories(d.tables, ec);
  fs::create_directories(d.heatmaps, ec);
  require(fs::is_directory(d.tables) && fs::is_directory(d.heatmaps),
          ErrorCode::IoError, "cannot create output directories under " +
                                  d.root.string());
  return d;
}

void echo_config(const ExperimentConfig& cfg, const OutputDirs& dirs) {
  nlohmann::json j = {{"experiment", cfg.name},
                      {"params", cfg.params},
                      {"descent", descent_config_to_json(cfg.descent)},
                      {"out", cfg.out_dir},
                      {"seed", cfg.seed},
                      {"threads", cfg.threads}};
  write_json_file((dirs.root / "config.json").string(), j);
}

std::vector<int> sizes_from_json(const nlohmann::json& j) {
  std::vector<int> out;
  for (const auto& v : j) out.push_back(v.get<int>());
  return out;
}

}  // namespace

double soft_supcon_tau_star(int C, double epsilon) {
  require(C >= 2, ErrorCode::InvalidArgument, "need C >= 2");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::BadEpsilon,
          "epsilon must lie in (0,1)");
  return static_cast<double>(C) / ((C - 1) * (-std::log(epsilon)));
}

Eigen::MatrixXd block_mean_cosines(const Embedding& Z,
                                   const ClassPartition& p) {
  require(Z.n() == p.n(), ErrorCode::SizeMismatch,
          "partition does not cover the embedding");
  const Eigen::MatrixXd Zh = normalized_rows(Z.z);
  const Eigen::MatrixXd G = Zh * Zh.transpose();
  const int C = p.C();
  Eigen::MatrixXd B(C, C);
  for (int c1 = 0; c1 < C; ++c1) {
    auto [b1, e1] = p.block(c1);
    for (int c2 = 0; c2 < C; ++c2) {
      auto [b2, e2] = p.block(c2);
      double acc = 0.0;
      long cnt = 0;
      for (int i = b1; i < e1; ++i)
        for (int j = b2; j < e2; ++j) {
          if (c1 == c2 && i == j) continue;
          acc += G(i, j);
          ++cnt;
        }
      B(c1, c2) = cnt ? acc / cnt : 1.0;
    }
  }
  return B;
}

double min_intra_cosine(const Embedding& Z, const ClassPartition& p) {
  const Eigen::MatrixXd Zh = normalized_rows(Z.z);
  const Eigen::MatrixXd G = Zh * Zh.transpose();
  double mn = 1.0;
  for (int c = 0; c < p.C(); ++c) {
    auto [b, e] = p.block(c);
    for (int i = b; i < e; ++i)
      for (int j = i + 1; j < e; ++j) mn = std::min(mn, G(i, j));
  }
  return mn;
}

double regularity_deviation(const Eigen::MatrixXd& block_means) {
  const int C = static_cast<int>(block_means.rows());
  const double target = -1.0 / (C - 1);
  double dev = 0.0;
  for (int a = 0; a < C; ++a)
    for (int b = 0; b < C; ++b)
      if (a != b) dev = std::max(dev, std::abs(block_means(a, b) - target));
  return dev;
}

DescentConfig descent_config_from_json(const nlohmann::json& j,
                                       const DescentConfig& base) {
  DescentConfig cfg = base;
  if (j.contains("steps")) cfg.steps = j["steps"].get<int>();
  if (j.contains("step_size")) cfg.step_size = j["step_size"].get<double>();
  if (j.contains("decay")) cfg.decay = j["decay"].get<double>();
  if (j.contains("restarts")) cfg.restarts = j["restarts"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("init_scale")) cfg.init_scale = j["init_scale"].get<double>();
  if (j.contains("stop_grad_norm"))
    cfg.stop_grad_norm = j["stop_grad_norm"].get<double>();
  if (j.contains("constraint")) {
    const std::string c = j["constraint"].get<std::string>();
    if (c == "free")
      cfg.constraint = Constraint::free;
    else if (c == "unit_sphere")
      cfg.constraint = Constraint::unit_sphere;
    else
      fail(ErrorCode::BadConfig, "constraint must be free|unit_sphere");
  }
  return cfg;
}

nlohmann::json descent_config_to_json(const DescentConfig& cfg) {
  return {{"steps", cfg.steps},
          {"step_size", cfg.step_size},
          {"decay", cfg.decay},
          {"restarts", cfg.restarts},
          {"seed", cfg.seed},
          {"init_scale", cfg.init_scale},
          {"constraint",
           cfg.constraint == Constraint::free ? "free" : "unit_sphere"},
          {"stop_grad_norm", cfg.stop_grad_norm}};
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  require(j.contains("experiment"), ErrorCode::BadConfig,
          "config needs an 'experiment' name");
  cfg.name = j["experiment"].get<std::string>();
  if (j.contains("params")) {
    require(j["params"].is_object(), ErrorCode::BadConfig,
            "'params' must be an object");
    cfg.params = j["params"];
  } else {
    cfg.params = nlohmann::json::object();
  }
  if (j.contains("descent"))
    cfg.descent = descent_config_from_json(j["descent"], DescentConfig{});
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  return cfg;
}

nlohmann::json run_experiment(const ExperimentConfig& cfg) {
  if (cfg.name == "imbalanced-supcon") return run_imbalanced_supcon(cfg);
  if (cfg.name == "yaware-sphere") return run_yaware_sphere(cfg);
  if (cfg.name == "kernel-pca") return run_kernel_pca(cfg);
  if (cfg.name == "quasi-optima") return run_quasi_optima(cfg);
  fail(ErrorCode::BadConfig, "unknown experiment '" + cfg.name + "'");
}

nlohmann::json run_imbalanced_supcon(const ExperimentConfig& cfg) {
  OutputDirs dirs = prepare_dirs(cfg);
  echo_config(cfg, dirs);

  const double tau_hard = cfg.params.value("tau", 0.1);
  const double epsilon = cfg.params.value("epsilon", std::exp(-1.0));
  const int q = cfg.params.value("q", 10);

  nlohmann::json profiles;
  if (cfg.params.contains("profiles")) {
    profiles = cfg.params["profiles"];
  } else {
    profiles = {{"balanced", {6, 6, 6, 6, 6, 6, 6, 6, 6, 6}},
                {"two_level", {4, 4, 4, 4, 4, 12, 12, 12, 12, 12}},
                {"geometric", {2, 2, 4, 4, 8, 8, 16, 16, 32, 32}},
                {"linear", {2, 4, 6, 8, 10, 12, 14, 16, 18, 20}}};
  }

  nlohmann::json report = nlohmann::json::array();
  for (auto it = profiles.begin(); it != profiles.end(); ++it) {
    const std::string profile = it.key();
    ClassPartition p(sizes_from_json(it.value()));
    const int C = p.C();
    const double tau_soft = soft_supcon_tau_star(C, epsilon);

    for (const std::string scheme : {"hard", "soft"}) {
      const bool hard = scheme == "hard";
      WeightMatrix W =
          hard ? supcon_weights(p) : soft_supcon_weights(p, epsilon);
      const double tau = hard ? tau_hard : tau_soft;
      SimilaritySpec spec = SimilaritySpec::spherical(tau);

      DescentConfig dc = cfg.descent;
      dc.constraint = Constraint::unit_sphere;
      dc.seed = cfg.seed;
      if (!hard) dc.stop_grad_norm = std::min(dc.stop_grad_norm, 1e-9);
      DescentTrace trace = minimize(W, spec, q, dc, cfg.threads);

      Eigen::MatrixXd B = block_mean_cosines(trace.final_embedding, p);
      const double collapse = min_intra_cosine(trace.final_embedding, p);
      const double dev = regularity_deviation(B);

      const std::string tag = scheme + "_" + profile;
      Eigen::MatrixXd Zh = normalized_rows(trace.final_embedding.z);
      write_pgm((dirs.heatmaps / (tag + "_cosines.pgm")).string(),
                Zh * Zh.transpose());
      write_matrix_csv((dirs.tables / (tag + "_block_means.csv")).string(), B);

      nlohmann::json entry = {{"scheme", scheme},
                              {"profile", profile},
                              {"sizes", it.value()},
                              {"tau", tau},
                              {"gap", trace.gap},
                              {"ratio_undefined", trace.ratio_undefined},
                              {"loss", trace.loss},
                              {"converged", trace.converged},
                              {"collapse_min_intra", collapse},
                              {"regularity_deviation", dev}};
      if (hard) {
        PrototypeGeometry geo = optimum_hard_supcon(p, tau, q);
        double agree = 0.0;
        for (int a = 0; a < C; ++a)
          for (int b = 0; b < C; ++b)
            if (a != b)
              agree = std::max(agree, std::abs(B(a, b) - geo.gram(a, b)));
        write_matrix_csv((dirs.tables / (tag + "_reduced_gram.csv")).string(),
                         geo.gram);
        entry["reduced_gram_agreement"] = agree;
        entry["reduced_loss"] = hard_supcon_reduced_loss(p, tau, geo.gram);
      } else {
        entry["beta_predicted"] = 1.0 + tau * std::log(epsilon);
      }
      report.push_back(std::move(entry));
    }
  }

  nlohmann::json out = {{"experiment", cfg.name}, {"runs", std::move(report)}};
  write_json_file((dirs.root / "report.json").string(), out);
  return out;
}

nlohmann::json run_yaware_sphere(const ExperimentConfig& cfg) {
  OutputDirs dirs = prepare_dirs(cfg);
  echo_config(cfg, dirs);

  const double tau = cfg.params.value("tau", 0.5);
  const int q = cfg.params.value("q", 2);
  const int replicas = cfg.params.value("replicas", 20);
  const int circle_n = cfg.params.value("circle_n", 60);
  const int restarts = cfg.params.value("restarts", 8);
  require(restarts >= 1, ErrorCode::BadConfig, "need at least one restart");

  // line labels {0, 1, 2}: three distinct collinear points never lie on a
  // 1-D hypersphere, so the spherical bound is unattainable
  const int n_line = 3 * replicas;
  Eigen::MatrixXd y_line(n_line, 1);
  for (int i = 0; i < n_line; ++i) y_line(i, 0) = static_cast<double>(i / replicas);
  LabelSet line_labels(y_line);
  WeightMatrix W_line = y_aware_weights(line_labels);
  SimilaritySpec sph = SimilaritySpec::spherical(tau);

  DescentConfig dc_line = cfg.descent;
  dc_line.constraint = Constraint::unit_sphere;
  dc_line.restarts = restarts;
  dc_line.seed = cfg.seed;

  Eigen::MatrixXd restart_gaps(restarts, 2);
  double floor_gap = std::numeric_limits<double>::infinity();
  DescentTrace best_line;
  for (int r = 0; r < restarts; ++r) {
    DescentConfig one = dc_line;
    one.restarts = 1;
    one.seed = cfg.seed + static_cast<std::uint64_t>(r);
    DescentTrace t = minimize(W_line, sph, q, one, 1);
    restart_gaps(r, 0) = r;
    restart_gaps(r, 1) = t.gap;
    if (t.gap < floor_gap) {
      floor_gap = t.gap;
      best_line = std::move(t);
    }
  }
  write_matrix_csv((dirs.tables / "line_restart_gaps.csv").string(),
                   restart_gaps);
  {
    Eigen::MatrixXd Zh = normalized_rows(best_line.final_embedding.z);
    write_pgm((dirs.heatmaps / "line_spherical_cosines.pgm").string(),
              Zh * Zh.transpose());
  }

  // the paper's correction: the same labels are attainable under the
  // Euclidean similarity
  DescentConfig dc_euc = cfg.descent;
  dc_euc.constraint = Constraint::free;
  dc_euc.seed = cfg.seed;
  SimilaritySpec euc = SimilaritySpec::euclidean();
  DescentTrace line_euc = minimize(W_line, euc, q, dc_euc, cfg.threads);
  Embedding target = optimum_euclidean_labels(line_labels, q);
  const double r2_line =
      procrustes_align(line_euc.final_embedding, target, ProcrustesMode::rigid)
          .r2;

  // circle labels lie on a hypersphere; tau = 1/(2 rho_y^2) matches the
  // unit circle so the bound is attained
  Eigen::MatrixXd y_circle(circle_n, 2);
  for (int i = 0; i < circle_n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / circle_n;
    y_circle(i, 0) = std::cos(a);
    y_circle(i, 1) = std::sin(a);
  }
  WeightMatrix W_circle = y_aware_weights(LabelSet(y_circle));
  DescentConfig dc_circle = cfg.descent;
  dc_circle.constraint = Constraint::unit_sphere;
  dc_circle.seed = cfg.seed;
  DescentTrace circle = minimize(W_circle, sph, 2, dc_circle, cfg.threads);
  {
    Eigen::MatrixXd Zh = normalized_rows(circle.final_embedding.z);
    write_pgm((dirs.heatmaps / "circle_spherical_cosines.pgm").string(),
              Zh * Zh.transpose());
  }

  nlohmann::json out = {
      {"experiment", cfg.name},
      {"tau", tau},
      {"line",
       {{"n", n_line},
        {"restarts", restarts},
        {"floor_gap", floor_gap},
        {"floor_at_least_1e-3", floor_gap >= 1e-3},
        {"euclidean_gap", line_euc.gap},
        {"euclidean_attained", line_euc.gap <= 1e-4},
        {"euclidean_r2_proc_rigid", r2_line}}},
      {"circle",
       {{"n", circle_n},
        {"gap", circle.gap},
        {"attained", circle.gap <= 1e-4}}}};
  write_json_file((dirs.root / "report.json").string(), out);
  return out;
}

nlohmann::json run_kernel_pca(const ExperimentConfig& cfg) {
  OutputDirs dirs = prepare_dirs(cfg);
  echo_config(cfg, dirs);

  const int n = cfg.params.value("n", 60);
  const int rank = cfg.params.value("rank", 2);
  const int q = cfg.params.value("q", 2);

  Rng rng(cfg.seed + 17);
  Eigen::MatrixXd Y = rng.gaussian(n, rank);
  Eigen::MatrixXd K = Y * Y.transpose();
  K = ((K + K.transpose()) / 2.0).eval();
  WeightMatrix W = kernel_weights(K);

  // kernel distance EDM; its classical realization is the set of kernel
  // principal components
  Eigen::MatrixXd Dk(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      Dk(i, j) = K(i, i) + K(j, j) - 2.0 * K(i, j);
  Dk.diagonal().setZero();
  DissimilarityMatrix D((Dk + Dk.transpose()) / 2.0);
  GeometryReport cert = certify(D);
  Embedding pcs = realize_euclidean(D, q);
  write_matrix_csv((dirs.tables / "kernel_pcs.csv").string(), pcs.z);

  DescentConfig dc = cfg.descent;
  dc.constraint = Constraint::free;
  dc.seed = cfg.seed;
  SimilaritySpec euc = SimilaritySpec::euclidean();
  DescentTrace trace = minimize(W, euc, q, dc, cfg.threads);
  write_matrix_csv((dirs.tables / "descent_embedding.csv").string(),
                   trace.final_embedding.z);
  const double r2 =
      procrustes_align(trace.final_embedding, pcs, ProcrustesMode::rigid).r2;

  // q below the kernel rank: realizability fails, the gap floor is positive
  DescentConfig dc_low = cfg.descent;
  dc_low.constraint = Constraint::free;
  dc_low.seed = cfg.seed;
  DescentTrace low = minimize(W, euc, std::max(1, rank - 1), dc_low, cfg.threads);

  // K = I: all kernel distances equal 2, a regular simplex
  const int ni = cfg.params.value("identity_n", 12);
  Eigen::MatrixXd Ki = Eigen::MatrixXd::Identity(ni, ni);
  Eigen::MatrixXd Di = Eigen::MatrixXd::Constant(ni, ni, 2.0);
  Di.diagonal().setZero();
  Embedding simplex = realize_euclidean(DissimilarityMatrix(Di), ni - 1);
  double dist_dev = 0.0;
  for (int i = 0; i < ni; ++i)
    for (int j = i + 1; j < ni; ++j)
      dist_dev = std::max(
          dist_dev,
          std::abs((simplex.z.row(i) - simplex.z.row(j)).squaredNorm() - 2.0));

  nlohmann::json out = {{"experiment", cfg.name},
                        {"n", n},
                        {"rank", rank},
                        {"q", q},
                        {"kernel_edm",
                         {{"is_edm", cert.is_edm},
                          {"embedding_dim", cert.embedding_dim}}},
                        {"descent_gap", trace.gap},
                        {"r2_proc_rigid_vs_pcs", r2},
                        {"r2_at_least_0.999", r2 >= 0.999},
                        {"low_q_gap_floor", low.gap},
                        {"identity_kernel_max_sqdist_dev", dist_dev}};
  write_json_file((dirs.root / "report.json").string(), out);
  return out;
}

nlohmann::json run_quasi_optima(const ExperimentConfig& cfg) {
  OutputDirs dirs = prepare_dirs(cfg);
  echo_config(cfg, dirs);

  std::vector<int> sizes = {4, 4, 4};
  if (cfg.params.contains("sizes"))
    sizes = sizes_from_json(cfg.params["sizes"]);
  ClassPartition p(sizes);
  require(p.C() == 3, ErrorCode::BadConfig, "three prototype shapes need C=3");

  std::vector<double> ms = {1.0, 2.0, 5.0, 10.0};
  if (cfg.params.contains("ms")) {
    ms.clear();
    for (const auto& v : cfg.params["ms"]) ms.push_back(v.get<double>());
  }

  std::vector<std::pair<std::string, Eigen::MatrixXd>> shapes;
  {
    Eigen::MatrixXd eq(3, 2), right(3, 2), scalene(3, 2);
    eq << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
    right << 0, 0, 1, 0, 0, 1;
    scalene << 0, 0, 1.3, 0, 0.25, 0.9;
    shapes = {{"equilateral", eq}, {"right", right}, {"scalene", scalene}};
  }

  WeightMatrix W = supcon_weights(p);
  SimilaritySpec euc = SimilaritySpec::euclidean();
  const double bound = entropic_bound(W);

  nlohmann::json table = nlohmann::json::array();
  Eigen::MatrixXd gaps(shapes.size(), ms.size());
  std::vector<Embedding> finals;
  for (size_t s = 0; s < shapes.size(); ++s) {
    for (size_t k = 0; k < ms.size(); ++k) {
      Embedding Z = quasi_optimum_euclidean_supcon(p, shapes[s].second, ms[k]);
      const double loss = infonce_loss(W, similarity_matrix(Z, euc));
      gaps(s, k) = loss - bound;
      table.push_back({{"shape", shapes[s].first},
                       {"m", ms[k]},
                       {"absolute_gap", gaps(s, k)}});
      if (ms[k] == ms.back()) finals.push_back(std::move(Z));
    }
  }
  write_matrix_csv((dirs.tables / "gaps.csv").string(), gaps);

  bool monotone = true;
  for (size_t s = 0; s < shapes.size(); ++s)
    for (size_t k = 1; k < ms.size(); ++k)
      if (gaps(s, k) > gaps(s, k - 1)) monotone = false;
  const double worst_final = gaps.col(ms.size() - 1).maxCoeff();

  // qualitative non-uniqueness: the shapes are mutually far from isometric
  double max_mutual_r2 = -std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < finals.size(); ++a)
    for (size_t b = a + 1; b < finals.size(); ++b)
      max_mutual_r2 = std::max(
          max_mutual_r2,
          procrustes_align(finals[a], finals[b], ProcrustesMode::rigid).r2);

  nlohmann::json out = {{"experiment", cfg.name},
                        {"bound", bound},
                        {"gaps", std::move(table)},
                        {"monotone_in_m", monotone},
                        {"max_gap_at_final_m", worst_final},
                        {"final_m_below_1e-10", worst_final <= 1e-10},
                        {"max_mutual_r2_proc", max_mutual_r2},
                        {"mutual_r2_below_0.99", max_mutual_r2 < 0.99}};
  write_json_file((dirs.root / "report.json").string(), out);
  return out;
}

}  // namespace congeo
