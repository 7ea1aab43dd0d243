#pragma once

#include "uht/feature_extraction.hpp"
#include "uht/mismatched.hpp"
#include "uht/prob.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace uht {

enum class WeightRule { inverse_kl, uniform, given };
enum class ModelDraw { normal, uniform };

/// Knobs of the end-to-end simulation: a randomly generated exponential
/// family with a dominant q-dimensional basis and a small q'-dimensional
/// perturbation, a training set of p alternates, a testing set of t fresh
/// distributions, and a sweep over rank bounds d.
struct ExperimentConfig {
  int alphabet_size = 20;
  int q = 8;
  int q_prime = 5;
  int p = 50;
  int t = 100;
  std::vector<int> d_values;
  double theta_range = 1.0;
  double theta_prime_range = 0.1;
  RngSeed master_seed;
  double svp_step = 0.0;        // <= 0 means 1/L
  double svp_stop_eps = 1e-8;
  int svp_max_iter = 5000;
  WeightRule weight_rule = WeightRule::inverse_kl;
  std::vector<double> given_weights;  // used when weight_rule == given
  ModelDraw model_draw = ModelDraw::normal;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// The hidden model: q + q' centered basis rows fixed for the whole run.
struct GeneratedModel {
  FeatureBasis basis;  // q + q' rows; first q are the dominant directions
  int q = 0;
  int q_prime = 0;
};

/// Draws the model bases row by row with i.i.d. entries (standard normal by
/// default), centering each row and redrawing rows that break minimality.
GeneratedModel generate_model(const ExperimentConfig& cfg);

/// One random member of the model family: theta ~ U[-theta_range,
/// theta_range]^q, theta' ~ U[-theta_prime_range, theta_prime_range]^{q'}.
Distribution generate_distribution(const GeneratedModel& model,
                                   const ExperimentConfig& cfg, RngSeed seed);

struct ResultRow {
  int d = 0;
  double avg_ratio_train = 0.0;
  double avg_ratio_test = 0.0;
  int p = 0;
  double objective = 0.0;
  int iterations = 0;
  RngSeed seed;
};

/// Training phase: extract a rank-d basis per requested d; testing phase:
/// average D^MM / D over fresh draws. Fully deterministic given the master
/// seed.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Header `d,avg_ratio_train,avg_ratio_test,p,objective,iterations,seed`,
/// floats with 6 significant digits.
std::string results_to_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace uht
