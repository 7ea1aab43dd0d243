#include "uht/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace uht {

namespace {

constexpr double kMinKl = 1e-10;

Eigen::VectorXd draw_row(std::mt19937_64& eng, int m, ModelDraw draw) {
  Eigen::VectorXd row(m);
  if (draw == ModelDraw::normal) {
    // Box-Muller on explicit uniform bits keeps the stream portable.
    for (int z = 0; z < m; z += 2) {
      const double u1 = 1.0 - uniform01(eng);
      const double u2 = uniform01(eng);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      row[z] = rad * std::cos(2.0 * M_PI * u2);
      if (z + 1 < m) row[z + 1] = rad * std::sin(2.0 * M_PI * u2);
    }
  } else {
    for (int z = 0; z < m; ++z) row[z] = 2.0 * uniform01(eng) - 1.0;
  }
  row.array() -= row.mean();
  return row;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (alphabet_size < 2) throw std::invalid_argument("experiment: alphabet_size must be >= 2");
  if (q < 1 || q_prime < 0 || p < 1 || t < 1) {
    throw std::invalid_argument("experiment: need q >= 1, q' >= 0, p >= 1, t >= 1");
  }
  if (q + q_prime + 1 > alphabet_size) {
    throw std::invalid_argument("experiment: need q + q' + 1 <= |Z| for a minimal model basis");
  }
  if (d_values.empty()) throw std::invalid_argument("experiment: d_values must be nonempty");
  for (int d : d_values) {
    if (d < 1 || d > std::min(p, alphabet_size)) {
      throw std::invalid_argument("experiment: each d must lie in [1, min(p, |Z|)]");
    }
  }
  if (theta_range < 0.0 || theta_prime_range < 0.0) {
    throw std::invalid_argument("experiment: theta ranges must be >= 0");
  }
  if (svp_stop_eps <= 0.0 || svp_max_iter < 1) {
    throw std::invalid_argument("experiment: invalid svp stopping parameters");
  }
  if (weight_rule == WeightRule::given &&
      static_cast<int>(given_weights.size()) != p) {
    throw std::invalid_argument("experiment: weight_rule=given needs p weights");
  }
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("alphabet_size", cfg.alphabet_size);
  get("q", cfg.q);
  get("q_prime", cfg.q_prime);
  get("p", cfg.p);
  get("t", cfg.t);
  get("d_values", cfg.d_values);
  get("theta_range", cfg.theta_range);
  get("theta_prime_range", cfg.theta_prime_range);
  if (j.contains("master_seed")) {
    const auto& s = j.at("master_seed");
    if (s.is_number()) {
      cfg.master_seed.master_seed = s.get<std::uint64_t>();
    } else {
      cfg.master_seed.master_seed = s.at("master_seed").get<std::uint64_t>();
      if (s.contains("stream_index")) {
        cfg.master_seed.stream_index = s.at("stream_index").get<std::uint64_t>();
      }
    }
  }
  get("svp_step", cfg.svp_step);
  get("svp_stop_eps", cfg.svp_stop_eps);
  get("svp_max_iter", cfg.svp_max_iter);
  if (j.contains("weight_rule")) {
    const std::string rule = j.at("weight_rule").get<std::string>();
    if (rule == "inverse_kl") cfg.weight_rule = WeightRule::inverse_kl;
    else if (rule == "uniform") cfg.weight_rule = WeightRule::uniform;
    else if (rule == "given") cfg.weight_rule = WeightRule::given;
    else throw std::invalid_argument("experiment: unknown weight_rule");
  }
  get("given_weights", cfg.given_weights);
  if (j.contains("model_draw")) {
    const std::string draw = j.at("model_draw").get<std::string>();
    if (draw == "normal") cfg.model_draw = ModelDraw::normal;
    else if (draw == "uniform") cfg.model_draw = ModelDraw::uniform;
    else throw std::invalid_argument("experiment: unknown model_draw");
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  return nlohmann::json{
      {"alphabet_size", cfg.alphabet_size},
      {"q", cfg.q},
      {"q_prime", cfg.q_prime},
      {"p", cfg.p},
      {"t", cfg.t},
      {"d_values", cfg.d_values},
      {"theta_range", cfg.theta_range},
      {"theta_prime_range", cfg.theta_prime_range},
      {"master_seed", {{"master_seed", cfg.master_seed.master_seed},
                       {"stream_index", cfg.master_seed.stream_index}}},
      {"svp_step", cfg.svp_step},
      {"svp_stop_eps", cfg.svp_stop_eps},
      {"svp_max_iter", cfg.svp_max_iter},
      {"weight_rule", cfg.weight_rule == WeightRule::inverse_kl ? "inverse_kl"
                      : cfg.weight_rule == WeightRule::uniform ? "uniform"
                                                               : "given"},
      {"given_weights", cfg.given_weights},
      {"model_draw", cfg.model_draw == ModelDraw::normal ? "normal" : "uniform"}};
}

GeneratedModel generate_model(const ExperimentConfig& cfg) {
  cfg.validate();
  const int m = cfg.alphabet_size;
  const int total = cfg.q + cfg.q_prime;
  auto eng = make_engine(substream(cfg.master_seed, 0));
  Eigen::MatrixXd rows(0, m);
  for (int k = 0; k < total; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Eigen::VectorXd row = draw_row(eng, m, cfg.model_draw);
      Eigen::MatrixXd candidate(rows.rows() + 1, m);
      candidate.topRows(rows.rows()) = rows;
      candidate.row(rows.rows()) = row.transpose();
      if (FeatureBasis::is_minimal(candidate)) {
        rows = std::move(candidate);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw std::runtime_error("generate_model: minimality unattainable after 100 redraws");
    }
  }
  return GeneratedModel{FeatureBasis(Alphabet(m), std::move(rows)), cfg.q,
                        cfg.q_prime};
}

Distribution generate_distribution(const GeneratedModel& model,
                                   const ExperimentConfig& cfg, RngSeed seed) {
  auto eng = make_engine(seed);
  Eigen::VectorXd coeffs(model.q + model.q_prime);
  for (int k = 0; k < model.q; ++k) {
    coeffs[k] = cfg.theta_range * (2.0 * uniform01(eng) - 1.0);
  }
  for (int k = 0; k < model.q_prime; ++k) {
    coeffs[model.q + k] = cfg.theta_prime_range * (2.0 * uniform01(eng) - 1.0);
  }
  return normalize_from_logits(model.basis.functions().transpose() * coeffs);
}

namespace {

Distribution generate_nondegenerate(const GeneratedModel& model,
                                    const ExperimentConfig& cfg,
                                    const Distribution& pi0, RngSeed base) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Distribution d = generate_distribution(
        model, cfg, substream(base, static_cast<std::uint64_t>(attempt)));
    const double div = kl_divergence(d, pi0);
    if (div > kMinKl && std::isfinite(div)) return d;
  }
  throw std::runtime_error("run_experiment: could not draw a distribution with D > 0 in 100 tries");
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const GeneratedModel model = generate_model(cfg);
  const Distribution pi0 =
      generate_distribution(model, cfg, substream(cfg.master_seed, 1));

  std::vector<Distribution> alternates;
  alternates.reserve(cfg.p);
  for (int i = 0; i < cfg.p; ++i) {
    alternates.push_back(generate_nondegenerate(
        model, cfg, pi0, substream(cfg.master_seed, 100 + i)));
  }
  std::vector<Distribution> testers;
  testers.reserve(cfg.t);
  for (int i = 0; i < cfg.t; ++i) {
    testers.push_back(generate_nondegenerate(
        model, cfg, pi0, substream(cfg.master_seed, 1000000 + i)));
  }

  Eigen::VectorXd train_kl(cfg.p);
  for (int i = 0; i < cfg.p; ++i) train_kl[i] = kl_divergence(alternates[i], pi0);
  Eigen::VectorXd test_kl(cfg.t);
  for (int i = 0; i < cfg.t; ++i) test_kl[i] = kl_divergence(testers[i], pi0);

  Eigen::VectorXd weights(cfg.p);
  switch (cfg.weight_rule) {
    case WeightRule::inverse_kl:
      weights = train_kl.cwiseInverse();
      break;
    case WeightRule::uniform:
      weights.setOnes();
      break;
    case WeightRule::given:
      for (int i = 0; i < cfg.p; ++i) weights[i] = cfg.given_weights[i];
      break;
  }

  std::vector<ResultRow> rows;
  rows.reserve(cfg.d_values.size());
  for (int d : cfg.d_values) {
    ObjectiveSpec spec(pi0, alternates, weights, d);
    SvpConfig svp;
    svp.step = cfg.svp_step > 0.0 ? cfg.svp_step
                                  : 1.0 / lipschitz_constant(spec);
    svp.stop_eps = cfg.svp_stop_eps;
    svp.max_iter = cfg.svp_max_iter;
    const SvpResult result = svp_solve(spec, svp);
    const FeatureBasis basis = extract_basis(result.x_star, d).basis;

    auto avg_ratio = [&](const std::vector<Distribution>& dists,
                         const Eigen::VectorXd& kls) {
      double sum = 0.0;
      for (std::size_t i = 0; i < dists.size(); ++i) {
        sum += mismatched_divergence(dists[i], pi0, basis).value / kls[i];
      }
      return sum / static_cast<double>(dists.size());
    };

    ResultRow row;
    row.d = d;
    row.avg_ratio_train = avg_ratio(alternates, train_kl);
    row.avg_ratio_test = avg_ratio(testers, test_kl);
    row.p = cfg.p;
    row.objective = result.objective;
    row.iterations = result.iterations;
    row.seed = cfg.master_seed;
    rows.push_back(row);
  }
  return rows;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "d,avg_ratio_train,avg_ratio_test,p,objective,iterations,seed\n";
  os << std::setprecision(6);
  for (const ResultRow& row : rows) {
    if (row.avg_ratio_train > 1.0 + 1e-6 || row.avg_ratio_test > 1.0 + 1e-6) {
      throw std::runtime_error("results_to_csv: ratio exceeds 1 beyond tolerance");
    }
    os << row.d << ',' << row.avg_ratio_train << ',' << row.avg_ratio_test
       << ',' << row.p << ',' << row.objective << ',' << row.iterations << ','
       << row.seed.master_seed << '\n';
  }
  return os.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out << results_to_csv(rows);
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace uht
