#include <CLI11.hpp>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "congeo/descent.hpp"
#include "congeo/distgeo.hpp"
#include "congeo/experiments.hpp"
#include "congeo/infonce.hpp"
#include "congeo/io.hpp"
#include "congeo/metrics.hpp"
#include "congeo/optima.hpp"
#include "congeo/weights.hpp"

namespace {

using congeo::ErrorCode;

std::vector<int> parse_sizes(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      congeo::fail(ErrorCode::InvalidArgument,
                   "bad class size '" + tok + "'");
    }
  }
  congeo::require(!out.empty(), ErrorCode::InvalidArgument,
                  "no class sizes given");
  return out;
}

struct SpecFlags {
  std::string kind = "euclidean";
  double tau = 1.0;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
  cmd->add_option("--spec", f.kind, "similarity: euclidean|spherical")
      ->check(CLI::IsMember({"euclidean", "spherical"}));
  cmd->add_option("--tau", f.tau, "spherical temperature")
      ->check(CLI::PositiveNumber);
}

congeo::SimilaritySpec to_spec(const SpecFlags& f) {
  return f.kind == "spherical" ? congeo::SimilaritySpec::spherical(f.tau)
                               : congeo::SimilaritySpec::euclidean();
}

void emit_report(const nlohmann::json& j, const std::string& path) {
  if (!path.empty()) congeo::write_json_file(path, j);
  std::cout << j.dump(2) << "\n";
}

// matrix argument: CSV path string or inline {"data": [[...]]}
Eigen::MatrixXd matrix_arg(const nlohmann::json& j) {
  if (j.is_string()) return congeo::read_matrix_csv(j.get<std::string>());
  return congeo::matrix_from_json(j);
}

congeo::WeightMatrix weights_from_config(const nlohmann::json& j) {
  congeo::require(j.contains("scheme"), ErrorCode::BadConfig,
                  "weight config needs a 'scheme'");
  const std::string scheme = j["scheme"].get<std::string>();
  if (scheme == "supcon" || scheme == "soft_supcon") {
    congeo::require(j.contains("sizes"), ErrorCode::BadConfig,
                    scheme + " needs 'sizes'");
    std::vector<int> sizes;
    for (const auto& v : j["sizes"]) sizes.push_back(v.get<int>());
    congeo::ClassPartition p(sizes);
    if (scheme == "supcon") return congeo::supcon_weights(p);
    congeo::require(j.contains("epsilon"), ErrorCode::BadConfig,
                    "soft_supcon needs 'epsilon'");
    return congeo::soft_supcon_weights(p, j["epsilon"].get<double>());
  }
  if (scheme == "y_aware" || scheme == "xclr") {
    congeo::require(j.contains("labels"), ErrorCode::BadConfig,
                    scheme + " needs 'labels'");
    congeo::LabelSet labels(matrix_arg(j["labels"]));
    if (scheme == "y_aware") return congeo::y_aware_weights(labels);
    congeo::require(j.contains("tau_prime"), ErrorCode::BadConfig,
                    "xclr needs 'tau_prime'");
    return congeo::xclr_weights(labels, j["tau_prime"].get<double>());
  }
  if (scheme == "kernel") {
    congeo::require(j.contains("kernel"), ErrorCode::BadConfig,
                    "kernel scheme needs 'kernel'");
    return congeo::kernel_weights(matrix_arg(j["kernel"]));
  }
  if (scheme == "product") {
    congeo::require(j.contains("factors") && j["factors"].is_array() &&
                        j["factors"].size() >= 2,
                    ErrorCode::BadConfig,
                    "product needs at least two 'factors'");
    congeo::WeightMatrix W = weights_from_config(j["factors"][0]);
    for (size_t k = 1; k < j["factors"].size(); ++k)
      W = congeo::combine_weights(W, weights_from_config(j["factors"][k]));
    return W;
  }
  congeo::fail(ErrorCode::BadConfig, "unknown weight scheme '" + scheme + "'");
}

void print_metrics_table(const congeo::MetricsReport& rep) {
  std::cout << std::left << std::setprecision(12);
  std::cout << std::setw(16) << "delta_w" << rep.delta.gap << "\n";
  std::cout << std::setw(16) << "ratio_undefined"
            << (rep.delta.ratio_undefined ? "true" : "false") << "\n";
  std::cout << std::setw(16) << "loss" << rep.delta.loss << "\n";
  std::cout << std::setw(16) << "bound" << rep.delta.bound << "\n";
  std::cout << std::setw(16) << "attained"
            << (rep.delta.attained ? "true" : "false") << "\n";
  std::cout << std::setw(16) << "r2_ssim" << rep.r2_ssim << "\n";
  std::cout << std::setw(16) << "r2_proc_rigid" << rep.r2_proc_rigid << "\n";
  std::cout << std::setw(16) << "r2_proc_linear" << rep.r2_proc_linear
            << "\n";
  std::cout << std::setw(16) << "r2_proc_local";
  if (rep.r2_proc_local)
    std::cout << *rep.r2_proc_local << "\n";
  else
    std::cout << "n/a\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted-InfoNCE geometry toolkit"};
  app.require_subcommand(1);

  // weights build
  auto* weights = app.add_subcommand("weights", "weight matrix construction");
  weights->require_subcommand(1);
  auto* build = weights->add_subcommand("build", "build W from a scheme");
  std::string w_config, w_scheme, w_sizes, w_labels, w_kernel,
      w_out = "weights.csv";
  double w_epsilon = std::exp(-1.0), w_tau_prime = 0.1;
  build->add_option("--config", w_config,
                    "JSON scheme config (supports the product scheme)");
  build->add_option("--scheme", w_scheme,
                    "supcon|soft-supcon|yaware|xclr|kernel")
      ->check(CLI::IsMember({"supcon", "soft-supcon", "yaware", "xclr",
                             "kernel"}));
  build->add_option("--sizes", w_sizes, "comma-separated class sizes");
  build->add_option("--labels", w_labels, "label matrix CSV (n x ell)");
  build->add_option("--kernel", w_kernel, "PSD kernel CSV (n x n)");
  build->add_option("--epsilon", w_epsilon, "soft SupCon cross-class weight");
  build->add_option("--tau-prime", w_tau_prime, "X-CLR label temperature");
  build->add_option("--out", w_out, "output CSV path");
  build->callback([&] {
    congeo::WeightMatrix W = [&] {
      if (!w_config.empty())
        return weights_from_config(congeo::read_json_file(w_config));
      congeo::require(!w_scheme.empty(), ErrorCode::InvalidArgument,
                      "either --config or --scheme is required");
      if (w_scheme == "supcon" || w_scheme == "soft-supcon") {
        congeo::require(!w_sizes.empty(), ErrorCode::InvalidArgument,
                        "--sizes required for " + w_scheme);
        congeo::ClassPartition p(parse_sizes(w_sizes));
        return w_scheme == "supcon" ? congeo::supcon_weights(p)
                                    : congeo::soft_supcon_weights(p, w_epsilon);
      }
      if (w_scheme == "yaware" || w_scheme == "xclr") {
        congeo::require(!w_labels.empty(), ErrorCode::InvalidArgument,
                        "--labels required for " + w_scheme);
        congeo::LabelSet labels(congeo::read_matrix_csv(w_labels));
        return w_scheme == "yaware"
                   ? congeo::y_aware_weights(labels)
                   : congeo::xclr_weights(labels, w_tau_prime);
      }
      congeo::require(!w_kernel.empty(), ErrorCode::InvalidArgument,
                      "--kernel required for kernel scheme");
      return congeo::kernel_weights(congeo::read_matrix_csv(w_kernel));
    }();
    congeo::write_matrix_csv(w_out, W.mat());
    std::cout << "wrote " << w_out << " (n = " << W.n() << ")\n";
  });

  // loss eval
  auto* loss = app.add_subcommand("loss", "loss evaluation");
  loss->require_subcommand(1);
  auto* eval = loss->add_subcommand("eval", "loss, bound, and gap of (W, Z)");
  std::string l_weights, l_embedding, l_report;
  SpecFlags l_spec;
  eval->add_option("--weights", l_weights, "weight matrix CSV")->required();
  eval->add_option("--embedding", l_embedding, "embedding CSV (n x q)")
      ->required();
  add_spec_flags(eval, l_spec);
  eval->add_option("--report", l_report, "also write the JSON report here");
  eval->callback([&] {
    congeo::WeightMatrix W(congeo::read_matrix_csv(l_weights));
    congeo::Embedding Z(congeo::read_matrix_csv(l_embedding));
    emit_report(congeo::to_json(congeo::loss_gap(W, Z, to_spec(l_spec))),
                l_report);
  });

  // bound
  auto* bound = app.add_subcommand("bound", "entropic lower bound H(p_W)");
  std::string b_weights;
  bound->add_option("--weights", b_weights, "weight matrix CSV")->required();
  bound->callback([&] {
    congeo::WeightMatrix W(congeo::read_matrix_csv(b_weights));
    emit_report({{"bound", congeo::entropic_bound(W)}}, "");
  });

  // certify
  auto* certify = app.add_subcommand("certify", "EDM / spherical certificate");
  std::string c_dissim, c_report;
  certify->add_option("--dissim", c_dissim, "dissimilarity CSV")->required();
  certify->add_option("--report", c_report, "also write the JSON report here");
  certify->callback([&] {
    congeo::DissimilarityMatrix D(congeo::read_matrix_csv(c_dissim));
    emit_report(congeo::to_json(congeo::certify(D)), c_report);
  });

  // realize
  auto* realize = app.add_subcommand("realize", "classical realization of D");
  std::string r_dissim, r_out = "embedding.csv";
  int r_q = 2;
  SpecFlags r_spec;
  realize->add_option("--dissim", r_dissim, "dissimilarity CSV")->required();
  realize->add_option("--q", r_q, "ambient dimension")->required();
  add_spec_flags(realize, r_spec);
  realize->add_option("--out", r_out, "output embedding CSV");
  realize->callback([&] {
    congeo::DissimilarityMatrix D(congeo::read_matrix_csv(r_dissim));
    congeo::Embedding Z = r_spec.kind == "spherical"
                              ? congeo::realize_spherical(D, r_spec.tau, r_q)
                              : congeo::realize_euclidean(D, r_q);
    congeo::write_matrix_csv(r_out, Z.z);
    std::cout << "wrote " << r_out << " (" << Z.n() << " x " << Z.q()
              << ")\n";
  });

  // optimize
  auto* opt = app.add_subcommand("optimize", "descent on the loss");
  std::string o_weights, o_out = "embedding.csv", o_trace, o_report,
              o_constraint;
  SpecFlags o_spec;
  congeo::DescentConfig o_cfg;
  int o_q = 2, o_threads = 1;
  opt->add_option("--weights", o_weights, "weight matrix CSV")->required();
  opt->add_option("--q", o_q, "embedding dimension")->required();
  add_spec_flags(opt, o_spec);
  opt->add_option("--steps", o_cfg.steps, "max accepted steps per restart");
  opt->add_option("--step-size", o_cfg.step_size, "initial step size");
  opt->add_option("--decay", o_cfg.decay, "step decay on plateau");
  opt->add_option("--restarts", o_cfg.restarts, "independent restarts");
  opt->add_option("--seed", o_cfg.seed, "base RNG seed");
  opt->add_option("--init-scale", o_cfg.init_scale, "initial Gaussian scale");
  opt->add_option("--stop-grad-norm", o_cfg.stop_grad_norm,
                  "gradient norm stopping threshold");
  opt->add_option("--constraint", o_constraint,
                  "free|unit-sphere (default follows --spec)")
      ->check(CLI::IsMember({"free", "unit-sphere"}));
  opt->add_option("--threads", o_threads, "parallel restarts");
  opt->add_option("--out", o_out, "final embedding CSV");
  opt->add_option("--trace", o_trace, "checkpoint trace JSONL");
  opt->add_option("--report", o_report, "also write the JSON report here");
  opt->callback([&] {
    congeo::WeightMatrix W(congeo::read_matrix_csv(o_weights));
    congeo::SimilaritySpec spec = to_spec(o_spec);
    if (o_constraint.empty())
      o_cfg.constraint = o_spec.kind == "spherical"
                             ? congeo::Constraint::unit_sphere
                             : congeo::Constraint::free;
    else
      o_cfg.constraint = o_constraint == "unit-sphere"
                             ? congeo::Constraint::unit_sphere
                             : congeo::Constraint::free;
    congeo::DescentTrace t = congeo::minimize(W, spec, o_q, o_cfg, o_threads);
    congeo::write_matrix_csv(o_out, t.final_embedding.z);
    if (!o_trace.empty()) congeo::write_trace_jsonl(o_trace, t);
    nlohmann::json j = congeo::to_json(t);
    j.erase("checkpoints");
    emit_report(j, o_report);
  });

  // metrics
  auto* metrics = app.add_subcommand("metrics", "alignment report vs target");
  std::string m_weights, m_embedding, m_target, m_sizes, m_report;
  SpecFlags m_spec;
  metrics->add_option("--weights", m_weights, "weight matrix CSV")
      ->required();
  metrics->add_option("--embedding", m_embedding, "embedding CSV")
      ->required();
  metrics->add_option("--target", m_target, "reference embedding CSV")
      ->required();
  add_spec_flags(metrics, m_spec);
  metrics->add_option("--sizes", m_sizes,
                      "class sizes for the grouped alignment");
  metrics->add_option("--report", m_report,
                      "also write the JSON report here");
  metrics->callback([&] {
    congeo::WeightMatrix W(congeo::read_matrix_csv(m_weights));
    congeo::Embedding Z(congeo::read_matrix_csv(m_embedding));
    congeo::Embedding Zs(congeo::read_matrix_csv(m_target));
    congeo::MetricsReport rep;
    if (m_sizes.empty()) {
      rep = congeo::full_report(W, Z, Zs, to_spec(m_spec));
    } else {
      congeo::ClassPartition p(parse_sizes(m_sizes));
      rep = congeo::full_report(W, Z, Zs, to_spec(m_spec), &p);
    }
    print_metrics_table(rep);
    if (!m_report.empty())
      congeo::write_json_file(m_report, congeo::to_json(rep));
  });

  // experiment <name>
  auto* exp = app.add_subcommand("experiment", "run a packaged experiment");
  std::string e_name, e_config, e_out;
  std::uint64_t e_seed = 0;
  int e_threads = 1;
  exp->add_option("name", e_name,
                  "imbalanced-supcon|yaware-sphere|kernel-pca|quasi-optima")
      ->required()
      ->check(CLI::IsMember({"imbalanced-supcon", "yaware-sphere",
                             "kernel-pca", "quasi-optima"}));
  exp->add_option("--config", e_config, "JSON config file");
  auto* e_seed_opt = exp->add_option("--seed", e_seed, "RNG seed");
  auto* e_out_opt = exp->add_option("--out", e_out, "output directory");
  auto* e_thr_opt = exp->add_option("--threads", e_threads,
                                    "parallel restarts inside descent");
  exp->callback([&] {
    congeo::ExperimentConfig cfg;
    if (!e_config.empty()) {
      nlohmann::json j = congeo::read_json_file(e_config);
      if (!j.contains("experiment")) j["experiment"] = e_name;
      cfg = congeo::parse_experiment_config(j);
      congeo::require(cfg.name == e_name, ErrorCode::BadConfig,
                      "config file names a different experiment");
    } else {
      cfg.name = e_name;
      cfg.params = nlohmann::json::object();
    }
    if (e_seed_opt->count()) cfg.seed = e_seed;
    if (e_out_opt->count()) cfg.out_dir = e_out;
    if (e_thr_opt->count()) cfg.threads = e_threads;
    nlohmann::json rep = congeo::run_experiment(cfg);
    std::cout << rep.dump(2) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const congeo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
