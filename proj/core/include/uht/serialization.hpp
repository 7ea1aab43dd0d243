#pragma once

#include "uht/feature_extraction.hpp"
#include "uht/mismatched.hpp"
#include "uht/prob.hpp"
#include "uht/universal_tests.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace uht {

using json = nlohmann::json;

json to_json(const Distribution& dist);           // array of floats
Distribution distribution_from_json(const json& j);

json to_json(const std::vector<int>& samples);    // array of 1-based ints
std::vector<int> samples_from_json(const json& j);

// {"alphabet_size": m, "functions": [[...], ...]}
json to_json(const FeatureBasis& basis);
FeatureBasis basis_from_json(const json& j);

json to_json(const VarianceReport& rep, TestVariant variant, int zsize, int d);
std::string variance_csv_header();
// d is -1 for the hoeffding variant.
std::string variance_csv_row(const VarianceReport& rep, TestVariant variant,
                             int zsize, int d);

json to_json(const SvpResult& result);

// {"pi0": [...], "alternates": [[...], ...], "weights": [...] (optional,
// default 1/D(pi_i||pi0)), "rank_bound": d (optional, overridable by CLI)}
ObjectiveSpec objective_spec_from_json(const json& j, int rank_bound);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);

}  // namespace uht
