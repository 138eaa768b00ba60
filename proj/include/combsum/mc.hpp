#pragma once

// Monte Carlo for combinatorial sums: plain simulation of S_n, naive tail
// counts, the tilted importance sampler (Metropolis chain over permutations
// targeting the conjugate law) and the two desk experiments built on them.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "combsum/ensemble.hpp"
#include "combsum/rng.hpp"
#include "combsum/tilt.hpp"

namespace combsum {

/// Samples per naive-MC block. Block b always uses stream b of the seed, so
/// results do not depend on how blocks are spread over workers.
inline constexpr std::uint64_t kBlockSize = 65536;
inline constexpr std::uint64_t kMinNaiveSamples = 10000;

/// Worker count from COMBSUM_WORKERS, else the hardware concurrency (>= 1).
unsigned default_workers();

enum class Method { naive, tilted_is, exact, saddlepoint };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view s) noexcept;

struct TailEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
  std::uint64_t n_samples = 0;
  Method method = Method::naive;
  /// No sample reached the threshold.
  bool below_resolution = false;
  /// Tilted IS without φ_n(h): ratio estimator, biased at finite sample size.
  bool self_normalized = false;
  /// Bound on the floating-point error of the importance weights
  /// exp(log φ_n(h) - hT); separate from the sampling error in std_err.
  double rounding_err = 0.0;
  double h = 0.0;
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
};

/// Draws S_n: a uniform permutation by Fisher–Yates, then one independent
/// draw per selected cell. Holds the permutation buffer so repeated draws
/// do not allocate.
class PermutationSumSampler {
 public:
  explicit PermutationSumSampler(const MatrixEnsemble& e);
  double operator()(Philox4x64& rng);
  /// Uniform permutation only (exposed for the uniformity test).
  const std::vector<std::size_t>& shuffle(Philox4x64& rng);

 private:
  const MatrixEnsemble* e_;
  std::vector<std::size_t> perm_;
};

double sample_S(const MatrixEnsemble& e, Philox4x64& rng);

/// N draws of S_n in block order (deterministic for a given seed).
std::vector<double> simulate_S(const MatrixEnsemble& e, std::uint64_t N, std::uint64_t seed,
                               unsigned workers = 0);

/// Fraction of N draws with S_n >= u √B_n (atoms within 1e-9 count).
/// std_err is the binomial √(p(1-p)/N). N >= 10^4.
TailEstimate naive_tail(const MatrixEnsemble& e, double u, std::uint64_t N, std::uint64_t seed,
                        unsigned workers = 0);

struct TiltedChainConfig {
  double h = 0.0;
  /// Metropolis proposals discarded before the first sample; 0 means the
  /// default 50 n² (50 sweeps of n proposals). Must be >= 10 n.
  std::uint64_t burn_in = 0;
  /// Proposals between samples; 0 means n (one sweep).
  std::uint64_t thin = 0;
  std::uint64_t n_batches = 20;
  std::uint64_t batch_size = 5000;
  std::uint64_t seed = 1;
  /// Independent chains; batches are dealt round-robin and pooled.
  unsigned n_chains = 1;
  unsigned workers = 0;
};

/// Metropolis chain on permutations with stationary weights
/// w(p) ∝ Π_i E e^{t X_{i p(i)}}, t = h/√B_n, using random transpositions.
class TiltedPermutationChain {
 public:
  TiltedPermutationChain(const MatrixEnsemble& e, double h, Philox4x64 rng);

  /// One transposition proposal.
  void step();
  void advance(std::uint64_t steps) {
    for (std::uint64_t k = 0; k < steps; ++k) step();
  }

  const std::vector<std::size_t>& permutation() const noexcept { return perm_; }

  /// Draws the tilted entries along the current permutation and returns
  /// their sum divided by √B_n.
  double sample_T();

  std::uint64_t proposed() const noexcept { return proposed_; }
  std::uint64_t accepted() const noexcept { return accepted_; }

 private:
  std::size_t n_;
  double root_b_;
  SquareMatrix<double> log_weight_;
  SquareMatrix<EntryDistribution> tilted_;
  std::vector<std::size_t> perm_;
  Philox4x64 rng_;
  std::uint64_t proposed_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Importance-sampling estimate of P(S_n >= u √B_n) under the tilted chain:
/// φ_n(h) · mean(e^{-h T} 1{T >= u}) with batch-means standard error. When
/// all draws land on one side of u the error is floored at the 1/N
/// resolution of the unseen side. When φ_n(h) is out of reach (n > 20) the
/// self-normalized ratio is returned and flagged.
TailEstimate tilted_is_tail(const MatrixEnsemble& e, double u, const TiltedChainConfig& cfg);

/// Saddlepoint root for u, or the largest admissible tilt when u is out of
/// reach. For n > 16, where m_n cannot be evaluated, min(u, h_max).
double choose_tilt(const MatrixEnsemble& e, double u, const TiltOptions& opts = {});

/// Mean and standard error of the batch averages.
struct BatchMeans {
  double mean = 0.0;
  double std_err = 0.0;
};
BatchMeans batch_means(const std::vector<double>& batch_averages);

// ---------------------------------------------------------------------------
// Experiments

using EnsembleFamily = std::function<MatrixEnsemble(std::size_t n)>;
using URule = std::function<double(const MatrixEnsemble& e)>;

struct RatioConfig {
  std::vector<std::size_t> n_list;
  URule u_rule;
  std::uint64_t N = 1000000;
  std::uint64_t seed = 1;
  /// Skip rows with u > zone_u_max(e, zone_slack).
  bool zone_guard = true;
  double zone_slack = 1.0;
  /// Forces a method instead of the automatic choice.
  std::optional<Method> method;
  TiltOptions tilt;
  unsigned workers = 0;
};

struct RatioRow {
  std::size_t n = 0;
  double u = 0.0;
  double gamma_n = 0.0;
  double p_hat = 0.0;
  double std_err = 0.0;
  double gauss_tail = 0.0;
  double ratio = 0.0;
  Method method = Method::naive;
  bool skipped = false;
  std::string skip_reason;
  TailEstimate estimate;
};

/// For each n: P(S_n >= u √B_n) / (1 - Φ(u)). Method: exact when n <= 7 and
/// the law is enumerable, else tilted IS when n <= 16 and the saddlepoint
/// equation is solvable, else naive. Infeasible rows are skipped with a
/// reason.
std::vector<RatioRow> ratio_experiment(const EnsembleFamily& family, const RatioConfig& cfg);

/// Kolmogorov distance between the empirical law of the (unsorted) sample
/// and Φ. The sample is sorted in place.
double ks_distance(std::vector<double>& sample);

/// Standard deviation of the KS statistic of N draws from the null law
/// (asymptotic Kolmogorov distribution).
double ks_noise_sigma(std::uint64_t N) noexcept;

struct EsseenRow {
  std::size_t n = 0;
  double gamma_n = std::numeric_limits<double>::quiet_NaN();
  double gamma_over_sqrt_n = std::numeric_limits<double>::quiet_NaN();
  double ks = 0.0;
  double ks_sigma = 0.0;
  bool within_bound = false;
};

struct EsseenTable {
  std::vector<EsseenRow> rows;
  /// Least-squares C in KS ≈ C γ_n/√n (through the origin).
  double fitted_C = std::numeric_limits<double>::quiet_NaN();
};

/// Empirical KS distance of S_n/√B_n to Φ along the family. A family with
/// B_n = 0 has T = 0 and KS = 1/2.
EsseenTable esseen_decay(const EnsembleFamily& family, const std::vector<std::size_t>& n_list,
                         std::uint64_t N, std::uint64_t seed, unsigned workers = 0);

/// Seed for row n of an experiment (SplitMix64 of the pair).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t n) noexcept;

}  // namespace combsum
