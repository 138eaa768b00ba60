#include "combsum/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "combsum/error.hpp"
#include "combsum/exact.hpp"
#include "combsum/mc.hpp"
#include "combsum/normal.hpp"
#include "combsum/spec_file.hpp"
#include "combsum/stats.hpp"
#include "combsum/tilt.hpp"

namespace combsum::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Collects the whole output and publishes it in one step: stdout, or a
// temporary file in the target directory renamed over the destination.
class Sink {
 public:
  explicit Sink(std::string path) : path_(std::move(path)) {}

  std::ostream& out() { return buf_; }

  void commit() {
    if (path_.empty() || path_ == "-") {
      std::cout << buf_.str() << std::flush;
      return;
    }
    const std::filesystem::path target(path_);
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw UsageError("cannot write " + tmp.string());
      f << buf_.str();
      f.close();
      if (!f) throw UsageError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
      std::filesystem::remove(tmp);
      throw UsageError("cannot move output into place at " + path_ + ": " + ec.message());
    }
  }

 private:
  std::string path_;
  std::ostringstream buf_;
};

struct GridArgs {
  std::vector<double> values;
  std::optional<double> lo, hi;
  std::size_t count = 0;
};

void add_grid(CLI::App* cmd, GridArgs& g, const std::string& name, const std::string& what) {
  cmd->add_option("--" + name, g.values, what + " values (comma separated)")->delimiter(',');
  cmd->add_option("--" + name + "-min", g.lo, "first " + what + " of an even grid");
  cmd->add_option("--" + name + "-max", g.hi, "last " + what + " of an even grid");
  cmd->add_option("--" + name + "-count", g.count, "points in the even grid");
}

std::vector<double> resolve_grid(const GridArgs& g, const std::string& name) {
  const bool ranged = g.lo || g.hi || g.count != 0;
  if (!g.values.empty() && ranged) {
    throw UsageError("give either --" + name + " or the --" + name + "-min/max/count grid");
  }
  if (!g.values.empty()) return g.values;
  if (!ranged) throw UsageError("missing --" + name + " (or --" + name + "-min/max/count)");
  if (!g.lo || !g.hi || g.count == 0) {
    throw UsageError("--" + name + "-min, --" + name + "-max and --" + name + "-count go together");
  }
  if (g.count == 1) return {*g.lo};
  std::vector<double> out(g.count);
  for (std::size_t k = 0; k < g.count; ++k) {
    out[k] = *g.lo + (*g.hi - *g.lo) * static_cast<double>(k) / static_cast<double>(g.count - 1);
  }
  return out;
}

void require_finite(const std::vector<double>& xs, const std::string& name) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw UsageError("--" + name + " values must be finite");
  }
}

void require_positive(const std::vector<double>& xs, const std::string& name) {
  for (double x : xs) {
    if (!(x > 0.0) || !std::isfinite(x)) throw UsageError("--" + name + " values must be positive");
  }
}

struct Options {
  std::string spec;
  std::string out;
  unsigned workers = 0;

  double slack = kDefaultZoneSlack;
  double D = 1.0;
  int K = 20;

  GridArgs z, u;

  double max_tilt = TiltOptions{}.max_tilt;
  double safety = TiltOptions{}.safety;
  bool lemma_circle = false;

  std::uint64_t N = 1000000;
  std::uint64_t seed = 1;

  std::optional<double> h;
  std::uint64_t burn_in = 0, thin = 0, batches = 20, batch_size = 5000;
  unsigned chains = 1;

  std::vector<std::size_t> n_list;
  std::optional<double> u_fixed;
  std::optional<double> u_zone;
  std::string method = "auto";
  bool no_zone_guard = false;
  double zone_slack = 1.0;
};

void add_spec(CLI::App* cmd, Options& o) {
  cmd->add_option("--spec", o.spec, "ensemble spec file (YAML)")->required();
}

void add_out(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output file (default: standard output)");
}

void add_tilt(CLI::App* cmd, Options& o) {
  cmd->add_option("--max-tilt", o.max_tilt, "hard cap on the tilt h");
  cmd->add_option("--safety", o.safety, "fraction of the m.g.f. domain edge h may reach");
  cmd->add_flag("--lemma-circle", o.lemma_circle, "also cap h by min{sqrt(n), sqrt(B_n)/M}/8");
}

void add_workers(CLI::App* cmd, Options& o) {
  cmd->add_option("--workers", o.workers,
                  "worker threads (default: COMBSUM_WORKERS or the number of cores)");
}

TiltOptions tilt_options(const Options& o) {
  TiltOptions t;
  t.max_tilt = o.max_tilt;
  t.safety = o.safety;
  t.lemma_circle = o.lemma_circle;
  if (!(t.safety > 0.0 && t.safety < 1.0)) throw UsageError("--safety must lie in (0, 1)");
  if (!(t.max_tilt > 0.0) || !std::isfinite(t.max_tilt)) {
    throw UsageError("--max-tilt must be positive and finite");
  }
  return t;
}

EnsembleSpec read_spec(const Options& o) {
  if (!std::filesystem::is_regular_file(o.spec)) throw UsageError("spec file not found: " + o.spec);
  return load_spec(o.spec);
}

std::string metadata(std::uint64_t seed, const std::string& config,
                     const std::string& extra = {}) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", fnv1a(config));
  std::string line = "# seed=" + std::to_string(seed) + ", config_hash=" + hash;
  if (!extra.empty()) line += ", " + extra;
  return line + "\n";
}

std::string config_text(const std::string& command, const EnsembleSpec& spec,
                        const std::map<std::string, std::string>& params) {
  std::string text = command + "\n" + serialize_spec(spec);
  for (const auto& [k, v] : params) text += k + "=" + v + "\n";
  return text;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : ",") + g17(x);
  return s;
}

// --- subcommands ---------------------------------------------------------------

int cmd_moments(const Options& o) {
  if (!(o.slack > 0.0 && o.slack <= 1.0)) throw UsageError("--slack must lie in (0, 1]");
  const MatrixEnsemble e = read_spec(o).build();
  const MomentSummary s = gamma_n(e, o.slack);
  Sink sink(o.out);
  sink.out() << "n,B_n,var_S,gamma_mean,gamma_row,gamma_col,gamma_third,gamma_n,zone_u_max\n";
  sink.out() << s.n << ',' << g17(s.B_n) << ',' << g17(s.var_S);
  for (double t : s.gamma_terms) sink.out() << ',' << g17(t);
  sink.out() << ',' << g17(s.gamma_n) << ',' << g17(s.zone_u_max) << '\n';
  sink.commit();
  std::cerr << "moments: n=" << s.n << " B_n=" << s.B_n << " var_S=" << s.var_S
            << " gamma_n=" << s.gamma_n << " zone_u_max=" << s.zone_u_max << '\n';
  return kExitOk;
}

int cmd_check(const Options& o) {
  if (!(o.D > 0.0)) throw UsageError("--D must be positive");
  if (o.K < 3 || o.K > kMaxMomentOrder) {
    throw UsageError("--K must lie in [3, " + std::to_string(kMaxMomentOrder) + "]");
  }
  const MatrixEnsemble e = read_spec(o).build(Centering::skip);
  const CenteringReport c = check_centering(e);
  const BernsteinReport b = check_bernstein(e, o.D, o.K);
  Sink sink(o.out);
  sink.out() << "centering: " << (c.pass ? "PASS" : "FAIL") << " worst_residual=" << g17(c.worst_residual)
             << (c.worst_location.empty() ? "" : " at " + c.worst_location) << '\n';
  sink.out() << "bernstein: " << (b.pass ? "PASS" : "FAIL") << " D=" << g17(b.D) << " K=" << b.K
             << " M=" << g17(e.scale()) << " max_ratio=" << g17(b.max_ratio)
             << " minimal_D=" << g17(b.minimal_D) << " worst_cell=(" << b.worst_row << ','
             << b.worst_col << ") s=" << b.worst_s << " k=" << b.worst_k
             << " skipped_cells=" << b.skipped_cells << '\n';
  sink.commit();
  return c.pass && b.pass ? kExitOk : kExitCheckFailed;
}

int cmd_exact(const Options& o) {
  const MatrixEnsemble e = read_spec(o).build();
  const ExactDistribution law = enumerate_law(e);
  Sink sink(o.out);
  sink.out() << "value,prob\n";
  for (const auto& a : law.support()) sink.out() << g17(a.value) << ',' << g17(a.prob) << '\n';
  sink.commit();
  std::cerr << "exact: " << law.support().size() << " atoms, mean=" << law.mean()
            << " variance=" << law.variance() << '\n';
  return kExitOk;
}

int cmd_mgf(const Options& o) {
  const std::vector<double> zs = resolve_grid(o.z, "z");
  require_finite(zs, "z");
  const MatrixEnsemble e = read_spec(o).build();
  Sink sink(o.out);
  sink.out() << "z,phi_re,phi_im\n";
  for (double z : zs) {
    const std::complex<double> phi = mgf_exact(e, z);
    sink.out() << g17(z) << ',' << g17(phi.real()) << ',' << g17(phi.imag()) << '\n';
  }
  sink.commit();
  std::cerr << "mgf: " << zs.size() << " points\n";
  return kExitOk;
}

int cmd_saddlepoint(const Options& o) {
  const std::vector<double> us = resolve_grid(o.u, "u");
  require_positive(us, "u");
  const TiltOptions topts = tilt_options(o);
  const MatrixEnsemble e = read_spec(o).build();
  Sink sink(o.out);
  sink.out() << "u,h,log_mgf,m,sigma2,tail_approx,gauss_tail,ratio\n";
  std::size_t done = 0;
  std::string last_reason;
  for (double u : us) {
    try {
      const SaddlepointResult r = solve_saddlepoint(e, u, topts);
      sink.out() << g17(r.u) << ',' << g17(r.h) << ',' << g17(r.log_mgf) << ',' << g17(r.m) << ','
                 << g17(r.sigma2) << ',' << g17(r.tail_approx) << ',' << g17(r.gauss_tail) << ','
                 << g17(r.tail_approx / r.gauss_tail) << '\n';
      ++done;
    } catch (const ZoneExceededError& err) {
      std::cerr << "saddlepoint: skipped u=" << u << ": " << err.what() << '\n';
      last_reason = err.reason();
    }
  }
  sink.commit();
  std::cerr << "saddlepoint: " << done << " of " << us.size() << " levels solved\n";
  if (done == 0) {
    std::cerr << "reason=" << last_reason << '\n';
    return kExitGuard;
  }
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  const std::vector<double> us = resolve_grid(o.u, "u");
  require_finite(us, "u");
  if (o.N < kMinNaiveSamples) throw UsageError("--N must be at least " + std::to_string(kMinNaiveSamples));
  const EnsembleSpec spec = read_spec(o);
  const MatrixEnsemble e = spec.build();
  Sink sink(o.out);
  sink.out() << metadata(o.seed, config_text("simulate", spec,
                                             {{"u", join(us)}, {"N", std::to_string(o.N)}}));
  sink.out() << "u,p_hat,std_err,n_samples,method,below_resolution\n";
  for (double u : us) {
    const TailEstimate t = naive_tail(e, u, o.N, o.seed, o.workers);
    sink.out() << g17(u) << ',' << g17(t.p_hat) << ',' << g17(t.std_err) << ',' << t.n_samples
               << ',' << to_string(t.method) << ',' << (t.below_resolution ? 1 : 0) << '\n';
    std::cerr << "simulate: u=" << u << " p_hat=" << t.p_hat << " +- " << t.std_err
              << (t.below_resolution ? " (below MC resolution)" : "") << '\n';
  }
  sink.commit();
  return kExitOk;
}

int cmd_is(const Options& o) {
  const std::vector<double> us = resolve_grid(o.u, "u");
  require_positive(us, "u");
  if (o.batches < 20) throw UsageError("--batches must be at least 20");
  if (o.batch_size == 0) throw UsageError("--batch-size must be positive");
  if (o.chains == 0) throw UsageError("--chains must be positive");
  if (o.h && (!(*o.h >= 0.0) || !std::isfinite(*o.h))) throw UsageError("--tilt must be non-negative");
  const TiltOptions topts = tilt_options(o);
  const EnsembleSpec spec = read_spec(o);
  const MatrixEnsemble e = spec.build();
  if (o.burn_in != 0 && o.burn_in < 10 * e.size()) {
    throw UsageError("--burn-in must be at least 10 n = " + std::to_string(10 * e.size()));
  }
  std::map<std::string, std::string> params{
      {"u", join(us)},
      {"burn_in", std::to_string(o.burn_in)},
      {"thin", std::to_string(o.thin)},
      {"batches", std::to_string(o.batches)},
      {"batch_size", std::to_string(o.batch_size)},
      {"chains", std::to_string(o.chains)},
      {"max_tilt", g17(topts.max_tilt)},
      {"safety", g17(topts.safety)},
      {"lemma_circle", topts.lemma_circle ? "1" : "0"}};
  if (o.h) params["h"] = g17(*o.h);

  Sink sink(o.out);
  sink.out() << metadata(o.seed, config_text("is", spec, params));
  sink.out() << "u,h,p_hat,std_err,rounding_err,n_samples,method,acceptance_rate,self_normalized\n";
  for (double u : us) {
    TiltedChainConfig cfg;
    cfg.h = o.h ? *o.h : choose_tilt(e, u, topts);
    cfg.burn_in = o.burn_in;
    cfg.thin = o.thin;
    cfg.n_batches = o.batches;
    cfg.batch_size = o.batch_size;
    cfg.n_chains = o.chains;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    const TailEstimate t = tilted_is_tail(e, u, cfg);
    sink.out() << g17(u) << ',' << g17(t.h) << ',' << g17(t.p_hat) << ',' << g17(t.std_err) << ','
               << g17(t.rounding_err) << ',' << t.n_samples << ',' << to_string(t.method) << ','
               << g17(t.acceptance_rate) << ','
               << (t.self_normalized ? 1 : 0) << '\n';
    std::cerr << "is: u=" << u << " h=" << t.h << " p_hat=" << t.p_hat << " +- " << t.std_err
              << (t.self_normalized ? " (self-normalized, biased)" : "") << '\n';
  }
  sink.commit();
  return kExitOk;
}

void require_sizes(const EnsembleSpec& spec, const std::vector<std::size_t>& ns) {
  if (ns.empty()) throw UsageError("--n needs at least one size");
  for (std::size_t n : ns) {
    if (n < 2) throw UsageError("--n values must be at least 2");
    if (!spec.resizable() && spec.n && n != *spec.n) {
      throw UsageError("family '" + spec.family + "' in the spec has fixed size " +
                       std::to_string(*spec.n) + "; --n " + std::to_string(n) + " is not available");
    }
  }
}

int cmd_ratio(const Options& o) {
  if (o.u_fixed.has_value() == o.u_zone.has_value()) {
    throw UsageError("give exactly one of --u (fixed level) and --u-zone (fraction of zone_u_max)");
  }
  if (o.u_fixed && !(*o.u_fixed > 0.0)) throw UsageError("--u must be positive");
  if (o.u_zone && !(*o.u_zone > 0.0)) throw UsageError("--u-zone must be positive");
  if (!(o.zone_slack > 0.0 && o.zone_slack <= 1.0)) throw UsageError("--zone-slack must lie in (0, 1]");
  if (o.N < kMinNaiveSamples) throw UsageError("--N must be at least " + std::to_string(kMinNaiveSamples));
  std::optional<Method> method;
  if (o.method != "auto") {
    method = parse_method(o.method);
    if (!method) throw UsageError("unknown --method '" + o.method + "'");
  }
  const EnsembleSpec spec = read_spec(o);
  require_sizes(spec, o.n_list);

  RatioConfig cfg;
  cfg.n_list = o.n_list;
  if (o.u_fixed) {
    const double u = *o.u_fixed;
    cfg.u_rule = [u](const MatrixEnsemble&) { return u; };
  } else {
    const double f = *o.u_zone;
    cfg.u_rule = [f](const MatrixEnsemble& e) { return f * zone_u_max(e, 1.0); };
  }
  cfg.N = o.N;
  cfg.seed = o.seed;
  cfg.zone_guard = !o.no_zone_guard;
  cfg.zone_slack = o.zone_slack;
  cfg.method = method;
  cfg.tilt = tilt_options(o);
  cfg.workers = o.workers;

  std::string ns;
  for (std::size_t n : o.n_list) ns += (ns.empty() ? "" : ",") + std::to_string(n);
  const std::string config = config_text(
      "ratio", spec,
      {{"n", ns},
       {"u", o.u_fixed ? g17(*o.u_fixed) : "zone*" + g17(*o.u_zone)},
       {"N", std::to_string(o.N)},
       {"method", o.method},
       {"zone_guard", cfg.zone_guard ? "1" : "0"},
       {"zone_slack", g17(o.zone_slack)}});

  const auto rows = ratio_experiment([&spec](std::size_t n) { return spec.build(n); }, cfg);
  Sink sink(o.out);
  sink.out() << metadata(o.seed, config);
  sink.out() << "n,u,gamma_n,p_hat,std_err,gauss_tail,ratio,method,status\n";
  std::size_t done = 0;
  std::string last_reason;
  for (const auto& r : rows) {
    sink.out() << r.n << ',' << g17(r.u) << ',' << g17(r.gamma_n) << ',';
    if (r.skipped) {
      sink.out() << "nan,nan," << g17(r.gauss_tail) << ",nan,none,"
                 << csv_field("skipped: " + r.skip_reason) << '\n';
      std::cerr << "ratio: n=" << r.n << " skipped: " << r.skip_reason << '\n';
      last_reason = r.skip_reason.substr(0, r.skip_reason.find(':'));
    } else {
      sink.out() << g17(r.p_hat) << ',' << g17(r.std_err) << ',' << g17(r.gauss_tail) << ','
                 << g17(r.ratio) << ',' << to_string(r.method) << ",ok\n";
      std::cerr << "ratio: n=" << r.n << " u=" << r.u << " ratio=" << r.ratio << " ("
                << to_string(r.method) << ")\n";
      ++done;
    }
  }
  sink.commit();
  if (done == 0) {
    std::cerr << "reason=" << last_reason << '\n';
    return kExitGuard;
  }
  return kExitOk;
}

int cmd_esseen(const Options& o) {
  if (o.N < 2) throw UsageError("--N must be at least 2");
  const EnsembleSpec spec = read_spec(o);
  require_sizes(spec, o.n_list);
  std::string ns;
  for (std::size_t n : o.n_list) ns += (ns.empty() ? "" : ",") + std::to_string(n);
  const std::string config = config_text("esseen", spec, {{"n", ns}, {"N", std::to_string(o.N)}});

  const EsseenTable table = esseen_decay([&spec](std::size_t n) { return spec.build(n); },
                                         o.n_list, o.N, o.seed, o.workers);
  Sink sink(o.out);
  sink.out() << metadata(o.seed, config, "fitted_C=" + g17(table.fitted_C));
  sink.out() << "n,gamma_n,gamma_over_sqrt_n,ks,ks_sigma,within_bound\n";
  for (const auto& r : table.rows) {
    sink.out() << r.n << ',' << g17(r.gamma_n) << ',' << g17(r.gamma_over_sqrt_n) << ','
               << g17(r.ks) << ',' << g17(r.ks_sigma) << ',' << (r.within_bound ? 1 : 0) << '\n';
    std::cerr << "esseen: n=" << r.n << " KS=" << r.ks << " gamma/sqrt(n)=" << r.gamma_over_sqrt_n
              << '\n';
  }
  sink.commit();
  std::cerr << "esseen: fitted C=" << table.fitted_C << '\n';
  return kExitOk;
}

}  // namespace

unsigned long long fnv1a(const std::string& text) noexcept {
  unsigned long long h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Combinatorial sums of random matrices: moments, exact laws, saddlepoint tails "
               "and Monte Carlo"};
  app.name(args.empty() ? "combsum" : args.front());
  app.require_subcommand(1);

  Options o;

  auto* moments = app.add_subcommand("moments", "B_n, Var S_n, the gamma_n terms and zone_u_max");
  add_spec(moments, o);
  add_out(moments, o);
  moments->add_option("--slack", o.slack, "zone slack in (0, 1]");

  auto* check = app.add_subcommand("check", "centering and Bernstein-condition checks");
  add_spec(check, o);
  add_out(check, o);
  check->add_option("--D", o.D, "Bernstein constant D");
  check->add_option("--K", o.K, "largest moment order checked");

  auto* exact = app.add_subcommand("exact", "exact law of S_n by enumeration");
  add_spec(exact, o);
  add_out(exact, o);

  auto* mgf = app.add_subcommand("mgf", "phi_n(z) = E exp(z S_n / sqrt(B_n)) via the permanent");
  add_spec(mgf, o);
  add_out(mgf, o);
  add_grid(mgf, o.z, "z", "z");

  auto* saddle = app.add_subcommand("saddlepoint", "saddlepoint root and tail approximation");
  add_spec(saddle, o);
  add_out(saddle, o);
  add_grid(saddle, o.u, "u", "u");
  add_tilt(saddle, o);

  auto* simulate = app.add_subcommand("simulate", "naive Monte Carlo tail P(S_n >= u sqrt(B_n))");
  add_spec(simulate, o);
  add_out(simulate, o);
  add_grid(simulate, o.u, "u", "u");
  simulate->add_option("--N", o.N, "number of samples");
  simulate->add_option("--seed", o.seed, "RNG seed");
  add_workers(simulate, o);

  auto* is = app.add_subcommand("is", "tilted importance sampling over permutations");
  add_spec(is, o);
  add_out(is, o);
  add_grid(is, o.u, "u", "u");
  add_tilt(is, o);
  is->add_option("--tilt", o.h, "tilt h (default: saddlepoint root)");
  is->add_option("--burn-in", o.burn_in, "proposals before sampling (default 50 n^2)");
  is->add_option("--thin", o.thin, "proposals between samples (default n)");
  is->add_option("--batches", o.batches, "number of batches (>= 20)");
  is->add_option("--batch-size", o.batch_size, "samples per batch");
  is->add_option("--chains", o.chains, "independent chains");
  is->add_option("--seed", o.seed, "RNG seed");
  add_workers(is, o);

  auto* ratio = app.add_subcommand("ratio", "P(S_n >= u sqrt(B_n)) / (1 - Phi(u)) along n");
  add_spec(ratio, o);
  add_out(ratio, o);
  ratio->add_option("--n", o.n_list, "sizes (comma separated)")->delimiter(',')->required();
  ratio->add_option("--u", o.u_fixed, "fixed level u");
  ratio->add_option("--u-zone", o.u_zone, "u = fraction of zone_u_max(e, 1)");
  ratio->add_option("--N", o.N, "samples per row (naive) or total chain samples (tilted IS)");
  ratio->add_option("--seed", o.seed, "RNG seed");
  ratio->add_option("--method", o.method, "auto, exact, tilted_is, naive or saddlepoint");
  ratio->add_flag("--no-zone-guard", o.no_zone_guard, "keep rows with u above zone_u_max");
  ratio->add_option("--zone-slack", o.zone_slack, "slack of the zone guard");
  add_tilt(ratio, o);
  add_workers(ratio, o);

  auto* esseen = app.add_subcommand("esseen", "KS distance of S_n / sqrt(B_n) to Phi along n");
  add_spec(esseen, o);
  add_out(esseen, o);
  esseen->add_option("--n", o.n_list, "sizes (comma separated)")->delimiter(',')->required();
  esseen->add_option("--N", o.N, "samples per size");
  esseen->add_option("--seed", o.seed, "RNG seed");
  add_workers(esseen, o);

  std::vector<const char*> argv;
  argv.push_back(args.empty() ? "combsum" : args.front().c_str());
  for (std::size_t k = 1; k < args.size(); ++k) argv.push_back(args[k].c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*moments) return cmd_moments(o);
    if (*check) return cmd_check(o);
    if (*exact) return cmd_exact(o);
    if (*mgf) return cmd_mgf(o);
    if (*saddle) return cmd_saddlepoint(o);
    if (*simulate) return cmd_simulate(o);
    if (*is) return cmd_is(o);
    if (*ratio) return cmd_ratio(o);
    if (*esseen) return cmd_esseen(o);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const SpecError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n' << "reason=" << err.reason() << '\n';
    return kExitGuard;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace combsum::cli
