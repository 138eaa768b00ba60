#include "combsum/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "combsum/error.hpp"
#include "combsum/exact.hpp"
#include "combsum/normal.hpp"
#include "combsum/permanent.hpp"
#include "combsum/stats.hpp"

namespace combsum {

namespace {

unsigned resolve_workers(unsigned requested) {
  return requested == 0 ? default_workers() : requested;
}

// Runs task(k) for k in [0, count) on up to `workers` threads. Tasks must
// write only to their own slots; the first exception is rethrown.
template <typename Task>
void parallel_for(std::uint64_t count, unsigned workers, Task task) {
  const auto threads = static_cast<unsigned>(
      std::min<std::uint64_t>(count, std::max(1u, resolve_workers(workers))));
  if (threads <= 1) {
    for (std::uint64_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t k = next++; k < count; k = next++) {
        try {
          task(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t block_count(std::uint64_t N) { return (N + kBlockSize - 1) / kBlockSize; }

std::uint64_t block_length(std::uint64_t N, std::uint64_t b) {
  return std::min(kBlockSize, N - b * kBlockSize);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void fisher_yates(std::vector<std::size_t>& perm, Philox4x64& rng) {
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = perm.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(perm[i - 1], perm[j]);
  }
}

}  // namespace

unsigned default_workers() {
  if (const char* env = std::getenv("COMBSUM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::naive: return "naive";
    case Method::tilted_is: return "tilted_is";
    case Method::exact: return "exact";
    case Method::saddlepoint: return "saddlepoint";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view s) noexcept {
  for (Method m : {Method::naive, Method::tilted_is, Method::exact, Method::saddlepoint}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t n) noexcept {
  return splitmix64(splitmix64(seed) ^ n);
}

// ---------------------------------------------------------------------------

PermutationSumSampler::PermutationSumSampler(const MatrixEnsemble& e) : e_(&e), perm_(e.size()) {}

const std::vector<std::size_t>& PermutationSumSampler::shuffle(Philox4x64& rng) {
  fisher_yates(perm_, rng);
  return perm_;
}

double PermutationSumSampler::operator()(Philox4x64& rng) {
  shuffle(rng);
  double s = 0.0;
  for (std::size_t i = 0; i < perm_.size(); ++i) s += (*e_)(i, perm_[i]).sample(rng);
  return s;
}

double sample_S(const MatrixEnsemble& e, Philox4x64& rng) {
  PermutationSumSampler sampler(e);
  return sampler(rng);
}

std::vector<double> simulate_S(const MatrixEnsemble& e, std::uint64_t N, std::uint64_t seed,
                               unsigned workers) {
  std::vector<double> out(N);
  parallel_for(block_count(N), workers, [&](std::uint64_t b) {
    Philox4x64 rng(seed, b);
    PermutationSumSampler sampler(e);
    const std::uint64_t start = b * kBlockSize;
    const std::uint64_t len = block_length(N, b);
    for (std::uint64_t k = 0; k < len; ++k) out[start + k] = sampler(rng);
  });
  return out;
}

TailEstimate naive_tail(const MatrixEnsemble& e, double u, std::uint64_t N, std::uint64_t seed,
                        unsigned workers) {
  if (N < kMinNaiveSamples) {
    throw std::invalid_argument("naive_tail needs N >= " + std::to_string(kMinNaiveSamples));
  }
  const double threshold = u * std::sqrt(b_n(e)) - kAtomTolerance;
  const std::uint64_t blocks = block_count(N);
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_for(blocks, workers, [&](std::uint64_t b) {
    Philox4x64 rng(seed, b);
    PermutationSumSampler sampler(e);
    const std::uint64_t len = block_length(N, b);
    std::uint64_t count = 0;
    for (std::uint64_t k = 0; k < len; ++k) count += sampler(rng) >= threshold ? 1 : 0;
    hits[b] = count;
  });
  const std::uint64_t total = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});

  TailEstimate est;
  est.method = Method::naive;
  est.n_samples = N;
  est.p_hat = static_cast<double>(total) / static_cast<double>(N);
  est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(N));
  est.below_resolution = total == 0;
  return est;
}

// ---------------------------------------------------------------------------

TiltedPermutationChain::TiltedPermutationChain(const MatrixEnsemble& e, double h, Philox4x64 rng)
    : n_(e.size()),
      root_b_(std::sqrt(b_n(e))),
      log_weight_(e.size()),
      tilted_(e.size(), EntryDistribution::point_mass(0.0)),
      perm_(e.size()),
      rng_(rng) {
  const double t = h / root_b_;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      log_weight_(i, j) = entry_log_mgf(e(i, j), t);
      tilted_(i, j) = tilt_entry(e(i, j), t);
    }
  }
  fisher_yates(perm_, rng_);
}

void TiltedPermutationChain::step() {
  ++proposed_;
  const auto i = static_cast<std::size_t>(uniform_index(rng_, n_));
  auto j = static_cast<std::size_t>(uniform_index(rng_, n_ - 1));
  if (j >= i) ++j;
  const std::size_t pi = perm_[i], pj = perm_[j];
  const double delta =
      log_weight_(i, pj) + log_weight_(j, pi) - log_weight_(i, pi) - log_weight_(j, pj);
  if (delta >= 0.0 || std::log(uniform01_open_left(rng_)) < delta) {
    std::swap(perm_[i], perm_[j]);
    ++accepted_;
  }
}

double TiltedPermutationChain::sample_T() {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += tilted_(i, perm_[i]).sample(rng_);
  return s / root_b_;
}

BatchMeans batch_means(const std::vector<double>& batch_averages) {
  const std::size_t k = batch_averages.size();
  if (k < 2) throw std::invalid_argument("batch means need at least two batches");
  const double mean =
      std::accumulate(batch_averages.begin(), batch_averages.end(), 0.0) / static_cast<double>(k);
  double ss = 0.0;
  for (double b : batch_averages) ss += (b - mean) * (b - mean);
  return {mean, std::sqrt(ss / (static_cast<double>(k) * static_cast<double>(k - 1)))};
}

double choose_tilt(const MatrixEnsemble& e, double u, const TiltOptions& opts) {
  const double h_max = max_admissible_tilt(e, opts);
  if (e.size() > kMaxTiltSize) return std::clamp(u, 0.0, h_max);
  // u at the top of the reachable range (typically the largest atom of a
  // bounded S_n): any root found there is an artifact of the tolerance and
  // leaves the chain blind to the complement, so tilt as hard as allowed.
  const TiltedState edge = edge_state(e, opts);
  if (u >= edge.m - kSaddlepointTolerance * std::max(1.0, u)) return edge.h;
  return solve_saddlepoint(e, u, opts).h;
}

TailEstimate tilted_is_tail(const MatrixEnsemble& e, double u, const TiltedChainConfig& cfg) {
  const std::size_t n = e.size();
  const std::uint64_t burn_in = cfg.burn_in == 0 ? 50 * n * n : cfg.burn_in;
  const std::uint64_t thin = cfg.thin == 0 ? n : cfg.thin;
  if (burn_in < 10 * n) throw std::invalid_argument("burn_in must be at least 10 n proposals");
  if (cfg.n_batches < 20) throw std::invalid_argument("tilted IS needs at least 20 batches");
  if (cfg.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (cfg.n_chains == 0) throw std::invalid_argument("n_chains must be positive");
  if (!(cfg.h >= 0.0) || !std::isfinite(cfg.h)) {
    throw std::invalid_argument("tilt h must be finite and non-negative");
  }

  const double h = cfg.h;
  const bool self_normalized = n > kMaxPermanentSize;
  const double log_phi = self_normalized ? 0.0 : log_mgf(e, h);
  const double cut = u - kAtomTolerance / std::sqrt(b_n(e));

  // Per batch: the IS average, or numerator and denominator of the ratio
  // estimator with weights e^{-h(T-u)}.
  std::vector<double> num(cfg.n_batches, 0.0), den(cfg.n_batches, 0.0);
  std::vector<std::uint64_t> proposed(cfg.n_chains, 0), accepted(cfg.n_chains, 0);
  std::vector<double> largest_exponent(cfg.n_chains, 0.0);
  std::vector<std::uint64_t> hits(cfg.n_chains, 0);

  parallel_for(cfg.n_chains, cfg.workers, [&](std::uint64_t c) {
    TiltedPermutationChain chain(e, h, Philox4x64(cfg.seed, c));
    chain.advance(burn_in);
    for (std::uint64_t k = c; k < cfg.n_batches; k += cfg.n_chains) {
      double sum_num = 0.0, sum_den = 0.0;
      for (std::uint64_t s = 0; s < cfg.batch_size; ++s) {
        chain.advance(thin);
        const double T = chain.sample_T();
        if (T >= cut) ++hits[c];
        if (self_normalized) {
          const double w = std::exp(-h * (T - u));
          sum_den += w;
          if (T >= cut) sum_num += w;
        } else if (T >= cut) {
          sum_num += std::exp(log_phi - h * T);
          largest_exponent[c] = std::max(largest_exponent[c], std::abs(log_phi) + std::abs(h * T));
        }
      }
      num[k] = sum_num / static_cast<double>(cfg.batch_size);
      den[k] = sum_den / static_cast<double>(cfg.batch_size);
    }
    proposed[c] = chain.proposed();
    accepted[c] = chain.accepted();
  });

  TailEstimate est;
  est.method = Method::tilted_is;
  est.n_samples = cfg.n_batches * cfg.batch_size;
  est.h = h;
  est.self_normalized = self_normalized;
  const double total_proposed =
      static_cast<double>(std::accumulate(proposed.begin(), proposed.end(), std::uint64_t{0}));
  const double total_accepted =
      static_cast<double>(std::accumulate(accepted.begin(), accepted.end(), std::uint64_t{0}));
  est.acceptance_rate = total_proposed > 0 ? total_accepted / total_proposed : 1.0;

  if (!self_normalized) {
    const BatchMeans bm = batch_means(num);
    est.p_hat = bm.mean;
    est.std_err = bm.std_err;
    // Each weight exponentiates a difference of terms of this size; a few
    // dozen ulps of it bound the relative error of every weight.
    const double scale = *std::max_element(largest_exponent.begin(), largest_exponent.end());
    est.rounding_err = est.p_hat * 32.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
  } else {
    const double k = static_cast<double>(cfg.n_batches);
    const double mean_num = std::accumulate(num.begin(), num.end(), 0.0) / k;
    const double mean_den = std::accumulate(den.begin(), den.end(), 0.0) / k;
    est.p_hat = mean_num / mean_den;
    double ss = 0.0;
    for (std::size_t b = 0; b < num.size(); ++b) {
      const double r = num[b] - est.p_hat * den[b];
      ss += r * r;
    }
    est.std_err = std::sqrt(ss / (k * (k - 1.0))) / mean_den;
  }

  // When every draw fell on one side of the cut, the batches agree exactly
  // and batch means reports no spread, yet the unseen side can carry a share
  // of order 1/N of the tilted law. Floor the error at that resolution.
  const auto total_hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  const double N = static_cast<double>(est.n_samples);
  if (total_hits == 0) {
    est.below_resolution = true;
    if (!self_normalized) est.std_err = std::max(est.std_err, std::exp(log_phi - h * u) / N);
  } else if (total_hits == est.n_samples) {
    est.std_err = std::max(est.std_err, est.p_hat / N);
  }
  return est;
}

// ---------------------------------------------------------------------------

std::vector<RatioRow> ratio_experiment(const EnsembleFamily& family, const RatioConfig& cfg) {
  if (!cfg.u_rule) throw std::invalid_argument("ratio experiment needs a u rule");
  std::vector<RatioRow> rows;
  for (std::size_t n : cfg.n_list) {
    RatioRow row;
    row.n = n;
    try {
      const MatrixEnsemble e = family(n);
      const MomentSummary summary = gamma_n(e, cfg.zone_slack);
      row.gamma_n = summary.gamma_n;
      row.u = cfg.u_rule(e);
      row.gauss_tail = normal_sf(row.u);
      if (cfg.zone_guard && row.u > summary.zone_u_max) {
        std::ostringstream os;
        os << "zone-exceeded: u = " << row.u << " > zone_u_max = " << summary.zone_u_max;
        row.skipped = true;
        row.skip_reason = os.str();
        rows.push_back(std::move(row));
        continue;
      }

      const std::uint64_t seed = derive_seed(cfg.seed, n);
      const double x = row.u * std::sqrt(summary.B_n);
      std::optional<double> saddle_h;
      Method method;
      if (cfg.method) {
        method = *cfg.method;
      } else if (n <= kMaxEnumerateDiscrete && enumerable(e)) {
        method = Method::exact;
      } else {
        method = Method::naive;
        if (n <= kMaxTiltSize) {
          try {
            saddle_h = solve_saddlepoint(e, row.u, cfg.tilt).h;
            method = Method::tilted_is;
          } catch (const ZoneExceededError&) {
          } catch (const NumericalDegeneracyError&) {
          }
        }
      }

      TailEstimate est;
      switch (method) {
        case Method::exact:
          est.method = Method::exact;
          est.p_hat = exact_tail(e, x);
          break;
        case Method::saddlepoint:
          est.method = Method::saddlepoint;
          est.p_hat = saddlepoint_tail(e, row.u, cfg.tilt);
          break;
        case Method::tilted_is: {
          TiltedChainConfig chain;
          chain.h = saddle_h ? *saddle_h : choose_tilt(e, row.u, cfg.tilt);
          chain.n_batches = 20;
          chain.batch_size = std::max<std::uint64_t>(1, (cfg.N + 19) / 20);
          chain.seed = seed;
          chain.workers = cfg.workers;
          est = tilted_is_tail(e, row.u, chain);
          break;
        }
        case Method::naive:
          est = naive_tail(e, row.u, cfg.N, seed, cfg.workers);
          break;
      }
      row.method = est.method;
      row.p_hat = est.p_hat;
      row.std_err = est.std_err;
      row.ratio = est.p_hat / row.gauss_tail;
      row.estimate = est;
    } catch (const Error& err) {
      row.skipped = true;
      row.skip_reason = err.reason() + ": " + err.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double ks_distance(std::vector<double>& sample) {
  if (sample.empty()) throw std::invalid_argument("KS distance of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double N = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / N - f, f - static_cast<double>(i) / N});
  }
  return d;
}

double ks_noise_sigma(std::uint64_t N) noexcept {
  // Standard deviation of the Kolmogorov distribution: √(π²/12 - (π/2) ln²2).
  constexpr double kKolmogorovSd = 0.26033;
  return kKolmogorovSd / std::sqrt(static_cast<double>(N));
}

EsseenTable esseen_decay(const EnsembleFamily& family, const std::vector<std::size_t>& n_list,
                         std::uint64_t N, std::uint64_t seed, unsigned workers) {
  EsseenTable table;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t n : n_list) {
    const MatrixEnsemble e = family(n);
    EsseenRow row;
    row.n = n;
    std::vector<double> sample = simulate_S(e, N, derive_seed(seed, n), workers);
    double root_b = 0.0;
    try {
      root_b = std::sqrt(b_n(e));
    } catch (const DegenerateEnsembleError&) {
    }
    if (root_b > 0.0) {
      for (auto& s : sample) s /= root_b;
      row.gamma_n = gamma_n(e).gamma_n;
      row.gamma_over_sqrt_n = row.gamma_n / std::sqrt(static_cast<double>(n));
    } else {
      std::fill(sample.begin(), sample.end(), 0.0);
    }
    row.ks = ks_distance(sample);
    row.ks_sigma = ks_noise_sigma(N);
    if (std::isfinite(row.gamma_over_sqrt_n)) {
      sxy += row.ks * row.gamma_over_sqrt_n;
      sxx += row.gamma_over_sqrt_n * row.gamma_over_sqrt_n;
    }
    table.rows.push_back(row);
  }
  if (sxx > 0.0) {
    table.fitted_C = sxy / sxx;
    for (auto& row : table.rows) {
      row.within_bound = std::isfinite(row.gamma_over_sqrt_n) &&
                         row.ks <= table.fitted_C * row.gamma_over_sqrt_n;
    }
  }
  return table;
}

}  // namespace combsum
