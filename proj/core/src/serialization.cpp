#include "uht/serialization.hpp"

#include <cmath>
#include <sstream>

namespace uht {

json to_json(const Distribution& dist) {
  json arr = json::array();
  for (int z = 0; z < dist.size(); ++z) arr.push_back(dist.probs()[z]);
  return arr;
}

Distribution distribution_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("distribution: expected a JSON array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return Distribution::normalized(std::move(v));
}

json to_json(const std::vector<int>& samples) {
  return json(samples);
}

std::vector<int> samples_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("samples: expected a JSON array");
  return j.get<std::vector<int>>();
}

json to_json(const FeatureBasis& basis) {
  json rows = json::array();
  for (int i = 0; i < basis.dim(); ++i) {
    json row = json::array();
    for (int z = 0; z < basis.alphabet().size; ++z) {
      row.push_back(basis.functions()(i, z));
    }
    rows.push_back(std::move(row));
  }
  return json{{"alphabet_size", basis.alphabet().size},
              {"functions", std::move(rows)}};
}

FeatureBasis basis_from_json(const json& j) {
  const int m = j.at("alphabet_size").get<int>();
  return FeatureBasis(Alphabet(m), matrix_from_json(j.at("functions")));
}

json to_json(const VarianceReport& rep, TestVariant variant, int zsize, int d) {
  return json{{"variant", variant == TestVariant::hoeffding ? "hoeffding" : "mismatched"},
              {"alphabet_size", zsize},
              {"d", d},
              {"n", rep.n},
              {"trials", rep.trials},
              {"mean_scaled", rep.mean_scaled},
              {"var_scaled", rep.var_scaled},
              {"theory", rep.theory},
              {"boundary_hits", rep.boundary_hits},
              {"seed", {{"master_seed", rep.seed.master_seed},
                        {"stream_index", rep.seed.stream_index}}}};
}

std::string variance_csv_header() {
  return "variant,zsize,d,n,trials,mean_scaled,var_scaled,theory,seed";
}

std::string variance_csv_row(const VarianceReport& rep, TestVariant variant,
                             int zsize, int d) {
  std::ostringstream os;
  os << (variant == TestVariant::hoeffding ? "hoeffding" : "mismatched") << ','
     << zsize << ',' << d << ',' << rep.n << ','
     << rep.trials << ',' << rep.mean_scaled << ',' << rep.var_scaled << ','
     << rep.theory << ',' << rep.seed.master_seed;
  return os.str();
}

json to_json(const SvpResult& result) {
  return json{{"objective", result.objective},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"step_norms", result.step_norms},
              {"x_star", matrix_to_json(result.x_star)}};
}

ObjectiveSpec objective_spec_from_json(const json& j, int rank_bound) {
  Distribution pi0 = distribution_from_json(j.at("pi0"));
  std::vector<Distribution> alternates;
  for (const json& alt : j.at("alternates")) {
    alternates.push_back(distribution_from_json(alt));
  }
  Eigen::VectorXd weights(alternates.size());
  if (j.contains("weights")) {
    const auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != alternates.size()) {
      throw std::invalid_argument("objective spec: weights size mismatch");
    }
    for (std::size_t i = 0; i < w.size(); ++i) weights[i] = w[i];
  } else {
    for (std::size_t i = 0; i < alternates.size(); ++i) {
      weights[i] = 1.0 / kl_divergence(alternates[i], pi0);
    }
  }
  if (rank_bound <= 0 && j.contains("rank_bound")) {
    rank_bound = j.at("rank_bound").get<int>();
  }
  return ObjectiveSpec(std::move(pi0), std::move(alternates),
                       std::move(weights), rank_bound);
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index z = 0; z < m.cols(); ++z) row.push_back(m(i, z));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::invalid_argument("matrix: expected an array of arrays");
  }
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != cols) throw std::invalid_argument("matrix: ragged rows");
    for (std::size_t z = 0; z < cols; ++z) m(i, z) = j[i][z].get<double>();
  }
  return m;
}

}  // namespace uht
