#include "uht/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uht {

namespace {

constexpr double kSumTol = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RngSeed substream(RngSeed seed, std::uint64_t k) {
  return RngSeed{seed.master_seed,
                 splitmix64(seed.stream_index * 0x9E3779B97F4A7C15ULL + k + 1)};
}

std::mt19937_64 make_engine(RngSeed seed) {
  std::uint64_t s = splitmix64(seed.master_seed ^ splitmix64(seed.stream_index));
  return std::mt19937_64(s);
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

Distribution::Distribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw std::invalid_argument("Distribution: need at least 2 entries");
  }
  if (!probs_.allFinite() || (probs_.array() < 0.0).any()) {
    throw std::invalid_argument("Distribution: entries must be finite and >= 0");
  }
  const double sum = probs_.sum();
  if (std::abs(sum - 1.0) > kSumTol) {
    throw std::invalid_argument("Distribution: entries must sum to 1 within 1e-12");
  }
  probs_ /= sum;
}

Distribution Distribution::normalized(Eigen::VectorXd weights) {
  if (!weights.allFinite() || (weights.array() < 0.0).any() ||
      weights.sum() <= 0.0) {
    throw std::invalid_argument("Distribution::normalized: need a finite nonnegative vector with positive sum");
  }
  weights /= weights.sum();
  return Distribution(std::move(weights));
}

double logsumexp(const Eigen::VectorXd& u) {
  const double m = u.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf, or a +inf entry
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] == -std::numeric_limits<double>::infinity()) continue;
    s += std::exp(u[i] - m);
  }
  return m + std::log(s);
}

double kl_divergence(const Distribution& mu, const Distribution& pi) {
  if (mu.size() != pi.size()) {
    throw std::invalid_argument("kl_divergence: size mismatch");
  }
  double d = 0.0;
  for (Eigen::Index z = 0; z < mu.probs().size(); ++z) {
    const double m = mu.probs()[z];
    if (m == 0.0) continue;
    const double p = pi.probs()[z];
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    d += m * std::log(m / p);
  }
  return std::max(d, 0.0);
}

std::vector<int> sample_iid(const Distribution& pi, std::int64_t n,
                            RngSeed seed) {
  if (n < 1) throw std::invalid_argument("sample_iid: n must be >= 1");
  // Inverse-CDF sampling so the stream depends only on the engine bits.
  Eigen::VectorXd cdf(pi.size());
  double acc = 0.0;
  for (int z = 0; z < pi.size(); ++z) {
    acc += pi.probs()[z];
    cdf[z] = acc;
  }
  cdf[pi.size() - 1] = 1.0;
  auto eng = make_engine(seed);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (auto& zi : out) {
    const double u = uniform01(eng);
    const double* begin = cdf.data();
    const double* it = std::upper_bound(begin, begin + cdf.size(), u);
    zi = static_cast<int>(it - begin) + 1;
  }
  return out;
}

EmpiricalDistribution empirical_from_samples(const std::vector<int>& samples,
                                             const Alphabet& alphabet) {
  if (samples.empty()) {
    throw std::invalid_argument("empirical_from_samples: empty sample sequence");
  }
  EmpiricalDistribution emp;
  emp.counts = Eigen::VectorXi::Zero(alphabet.size);
  for (int z : samples) {
    if (z < 1 || z > alphabet.size) {
      throw std::invalid_argument("empirical_from_samples: sample out of range");
    }
    emp.counts[z - 1] += 1;
  }
  emp.n = static_cast<std::int64_t>(samples.size());
  return emp;
}

Distribution tilt(const Distribution& pi, const Eigen::VectorXd& f) {
  if (pi.size() != f.size()) throw std::invalid_argument("tilt: size mismatch");
  Eigen::VectorXd logits(pi.size());
  for (int z = 0; z < pi.size(); ++z) {
    logits[z] = pi.probs()[z] > 0.0
                    ? std::log(pi.probs()[z]) + f[z]
                    : -std::numeric_limits<double>::infinity();
  }
  const double lse = logsumexp(logits);
  if (!std::isfinite(lse)) {
    throw std::invalid_argument("tilt: no positive mass where f is finite");
  }
  // Rounding in lse can leave the sum slightly off 1 for extreme logits.
  return Distribution::normalized((logits.array() - lse).exp().matrix());
}

Distribution normalize_from_logits(const Eigen::VectorXd& u) {
  const double lse = logsumexp(u);
  if (!std::isfinite(lse)) {
    throw std::invalid_argument("normalize_from_logits: degenerate logits");
  }
  return Distribution::normalized((u.array() - lse).exp().matrix());
}

}  // namespace uht
