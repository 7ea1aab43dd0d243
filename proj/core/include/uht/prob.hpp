#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace uht {

/// Finite observation space; points are identified with 1..size.
struct Alphabet {
  int size = 0;

  explicit Alphabet(int size_) : size(size_) {
    if (size < 2) throw std::invalid_argument("Alphabet: size must be >= 2");
  }
};

/// Seed for a reproducible random stream. Identical (master_seed,
/// stream_index) pairs always yield identical streams.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Derives the k-th child stream of a seed. Counter-based, so parallel and
/// serial fan-out agree bit-for-bit.
RngSeed substream(RngSeed seed, std::uint64_t k);

/// Engine seeded from an (master, stream) pair via splitmix64 mixing.
std::mt19937_64 make_engine(RngSeed seed);

/// Uniform double in [0,1) from the top 53 bits of the engine output.
double uniform01(std::mt19937_64& eng);

/// A probability vector on a finite alphabet. Entries are nonnegative and
/// sum to 1; inputs within 1e-12 of unit sum are renormalized on
/// construction, anything further off is rejected.
class Distribution {
 public:
  explicit Distribution(Eigen::VectorXd probs);
  Distribution(std::initializer_list<double> probs)
      : Distribution(Eigen::Map<const Eigen::VectorXd>(
            std::data(probs), static_cast<Eigen::Index>(probs.size()))) {}

  /// Rescales any finite nonnegative vector with positive sum.
  static Distribution normalized(Eigen::VectorXd weights);

  const Eigen::VectorXd& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator()(int z) const { return probs_[z - 1]; }  // 1-based
  bool full_support() const { return (probs_.array() > 0.0).all(); }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.probs_ == b.probs_;
  }

 private:
  Eigen::VectorXd probs_;
};

/// Histogram of n observations.
struct EmpiricalDistribution {
  Eigen::VectorXi counts;
  std::int64_t n = 0;

  Distribution distribution() const {
    return Distribution(counts.cast<double>() / static_cast<double>(n));
  }
};

/// log(sum(exp(u))) with max-subtraction; -inf entries contribute nothing.
double logsumexp(const Eigen::VectorXd& u);

/// D(mu || pi) = sum_z mu(z) log(mu(z)/pi(z)), with 0 log 0 := 0.
/// Returns +inf when mu puts mass where pi does not.
double kl_divergence(const Distribution& mu, const Distribution& pi);

/// n i.i.d. draws from pi, as 1-based alphabet points. Deterministic given
/// the seed.
std::vector<int> sample_iid(const Distribution& pi, std::int64_t n,
                            RngSeed seed);

/// Histogram of a 1-based sample sequence. Rejects empty input and
/// out-of-range points.
EmpiricalDistribution empirical_from_samples(const std::vector<int>& samples,
                                             const Alphabet& alphabet);

/// Exponential tilt: pi(z) e^{f(z)} / <pi, e^f>, computed in the log domain.
Distribution tilt(const Distribution& pi, const Eigen::VectorXd& f);

/// exp(u(z) - logsumexp(u)); equals tilt(uniform, u).
Distribution normalize_from_logits(const Eigen::VectorXd& u);

}  // namespace uht
