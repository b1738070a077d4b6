#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coalsim/coalescent.hpp"
#include "coalsim/coupling.hpp"
#include "coalsim/csbp.hpp"
#include "coalsim/harness.hpp"
#include "coalsim/io.hpp"
#include "coalsim/measure.hpp"
#include "coalsim/mu_dist.hpp"
#include "coalsim/numeric.hpp"
#include "coalsim/parallel.hpp"
#include "coalsim/rates.hpp"

namespace {

using namespace coalsim;

constexpr int kExitPass = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct MeasureFlags {
  std::string name = "beta";
  double alpha = 1.5;
  double coeff_a = 1.0;
  double delta = 1.0;

  MeasureSpec build() const {
    if (name == "kingman") return MeasureSpec::Kingman();
    if (name == "beta") return MeasureSpec::Beta(alpha);
    if (name == "power") {
      const double a = alpha, c = coeff_a;
      return MeasureSpec::Density(
          a, c, [a, c](double x) { return c * std::pow(x, 1.0 - a); }, delta);
    }
    throw std::invalid_argument("unknown measure '" + name + "'");
  }
};

void add_measure_flags(CLI::App* cmd, MeasureFlags& flags) {
  cmd->add_option("--measure", flags.name, "beta|kingman|power")
      ->check(CLI::IsMember({"beta", "kingman", "power"}));
  cmd->add_option("--alpha", flags.alpha, "stability index in (1,2)");
  cmd->add_option("--A", flags.coeff_a, "x^{1-alpha} coefficient (power measure)");
  cmd->add_option("--delta", flags.delta, "support cutoff in (0,1] (power measure)");
}

std::string echo_command(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

int cmd_rates(const MeasureFlags& flags, const std::vector<int>& bs, int max_k,
              const std::string& out, const std::string& echo) {
  const MeasureSpec measure = flags.build();
  RateCache cache(measure);
  std::ostringstream os;
  write_header_block(os, FileHeader{echo, 0});
  os << "b,quantity,index,value\n";
  for (int b : bs) {
    if (b < 2) throw std::invalid_argument("rates requires b >= 2");
    const int k_hi = max_k > 0 ? std::min(max_k, b) : b;
    for (int k = 2; k <= k_hi; ++k) {
      os << b << ",lambda_bk," << k << ',' << format_g17(lambda_bk(measure, b, k)) << '\n';
    }
    os << b << ",lambda_total,0," << format_g17(cache.total_rate(b)) << '\n';
    const auto zeta = jump_distribution(cache, b);
    const int z_hi = max_k > 0 ? std::min<int>(max_k, static_cast<int>(zeta.size()))
                               : static_cast<int>(zeta.size());
    for (int k = 1; k <= z_hi; ++k) {
      os << b << ",zeta," << k << ',' << format_g17(zeta[static_cast<std::size_t>(k - 1)])
         << '\n';
    }
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    f << os.str();
  }
  return kExitPass;
}

int cmd_simulate(const MeasureFlags& flags, int n, double horizon, int to_count,
                 int replicates, std::uint64_t seed, int threads,
                 const std::vector<double>& snapshot_times,
                 const std::vector<int>& k_hits, const std::string& out,
                 const std::string& echo) {
  if (n < 2) throw std::invalid_argument("simulate requires --n >= 2");
  const MeasureSpec measure = flags.build();
  auto cache = std::make_shared<RateCache>(measure);
  cache->ensure_totals_upto(n);

  ChainStop stop;
  if (to_count > 0) stop.target_count = to_count;
  if (horizon > 0.0) stop.horizon = horizon;

  std::vector<BlockCountPath> paths(static_cast<std::size_t>(replicates));
  std::vector<PartitionState> snapshots;
  const bool need_partition = !snapshot_times.empty();
  if (need_partition) {
    snapshots.resize(snapshot_times.size() * static_cast<std::size_t>(replicates));
  }
  parallel_replicates(replicates, threads, [&](int rep) {
    RngStream rng(seed, static_cast<std::uint64_t>(rep));
    if (need_partition) {
      PartitionChain chain(cache, n, &rng);
      for (std::size_t s = 0; s < snapshot_times.size(); ++s) {
        chain.run_until(snapshot_times[s]);
        snapshots[static_cast<std::size_t>(rep) * snapshot_times.size() + s] = chain.state();
      }
      if (to_count > 0) chain.run_to_count(to_count);
      paths[static_cast<std::size_t>(rep)] = chain.take_trajectory().counts;
    } else {
      paths[static_cast<std::size_t>(rep)] = simulate_block_chain(*cache, n, stop, rng);
    }
  });

  const FileHeader header{echo, seed};
  const std::string events_path = out.empty() ? "events.csv" : out;
  write_event_log_csv(events_path, paths, header);
  if (need_partition) {
    write_partition_snapshot_csv(events_path + ".blocks.csv", snapshots, header);
  }

  double mean_final = 0.0;
  for (const auto& p : paths) mean_final += p.final_count();
  mean_final /= replicates;
  std::cout << "replicates=" << replicates << " mean_final_count=" << mean_final << '\n';
  if (to_count == 1) {
    bool all_done = true;
    double mean_length = 0.0;
    for (const auto& p : paths) {
      if (p.final_count() != 1) {
        all_done = false;
        break;
      }
      mean_length += tree_length(p);
    }
    if (all_done) std::cout << "mean_tree_length=" << mean_length / replicates << '\n';
  }
  for (int k : k_hits) {
    int hit = 0, reached = 0;
    double mean_t = 0.0;
    for (const auto& p : paths) {
      const auto h = first_hit_time(p, k);
      if (!h) continue;
      ++reached;
      if (h->exact) ++hit;
      mean_t += h->time;
    }
    std::cout << "T_" << k << ": reached=" << reached
              << " exact_hit_fraction=" << (reached ? static_cast<double>(hit) / reached : 0.0)
              << " mean_time=" << (reached ? mean_t / reached : 0.0) << '\n';
  }
  std::cout << "wrote " << events_path << '\n';
  return kExitPass;
}

int cmd_csbp(double alpha, double a, double t, int replicates, std::uint64_t seed,
             int threads, bool with_time_change, double grid_theta0, double grid_step,
             const std::string& out, const std::string& echo) {
  if (!(t > 0.0)) throw std::invalid_argument("csbp requires --t > 0");
  const MuTable mu = build_mu_table(alpha);
  std::vector<AtomSystem> systems(static_cast<std::size_t>(replicates));
  parallel_replicates(replicates, threads, [&](int rep) {
    RngStream rng(seed, static_cast<std::uint64_t>(rep));
    systems[static_cast<std::size_t>(rep)] = sample_atoms(alpha, t, a, mu, rng);
  });
  const FileHeader header{echo, seed};
  const std::string atoms_path = out.empty() ? "atoms.csv" : out;
  write_atom_snapshot_csv(atoms_path, systems, header);
  double mean_count = 0.0, mean_mass = 0.0;
  for (const auto& s : systems) {
    mean_count += s.count();
    mean_mass += s.total_mass;
  }
  std::cout << "replicates=" << replicates << " mean_atom_count=" << mean_count / replicates
            << " mean_total_mass=" << mean_mass / replicates
            << " theta_t=" << csbp_theta(alpha, t) << '\n';
  std::cout << "wrote " << atoms_path << '\n';

  if (with_time_change) {
    RngStream rng(seed, 1ull << 48);
    const double s1 = std::pow(grid_theta0, -(alpha - 1.0)) / (alpha - 1.0);
    std::vector<double> grid{s1}, zs;
    AtomSystem sys = sample_atoms(alpha, s1, a, mu, rng);
    zs.push_back(sys.total_mass);
    double step = s1 * 0.3;
    double s_cur = s1;
    while (s_cur < t && sys.total_mass > 0.0) {
      step = std::min(step * 1.3, grid_step);
      const double ds = std::min(step, t - s_cur);
      sys = evolve_atoms(sys, ds, mu, rng);
      s_cur += ds;
      grid.push_back(s_cur);
      zs.push_back(sys.total_mass);
    }
    const TimeChangePath tc = time_change(grid, zs, alpha, a);
    const std::string tc_path = atoms_path + ".timechange.csv";
    write_time_change_csv(tc_path, tc, header);
    std::cout << "wrote " << tc_path << (tc.truncated ? " (truncated: extinction)" : "")
              << '\n';
  }
  return kExitPass;
}

int cmd_couple(const MeasureFlags& flags, const std::string& mode, double factor,
               double restrict_delta, int n, double horizon, int replicates,
               std::uint64_t seed, int threads, const std::string& out,
               const std::string& echo) {
  const MeasureSpec m1 = flags.build();
  MeasureSpec m2 = m1;
  const double alpha = flags.alpha;
  if (mode == "scale") {
    if (!(factor > 0.0 && factor <= 1.0)) {
      throw std::invalid_argument("--factor must lie in (0,1]");
    }
    const MeasureSpec base = m1;
    m2 = MeasureSpec::Density(
        alpha, factor * m1.singular_coeff(),
        [base, factor](double x) { return factor * base.density_at(x); }, m1.cutoff());
  } else if (mode == "restrict") {
    if (!(restrict_delta > 0.0 && restrict_delta <= m1.cutoff())) {
      throw std::invalid_argument("--restrict-delta must lie in (0, cutoff]");
    }
    const MeasureSpec base = m1;
    m2 = MeasureSpec::Density(
        alpha, m1.singular_coeff(), [base](double x) { return base.density_at(x); },
        restrict_delta);
  } else {
    throw std::invalid_argument("--mode must be scale or restrict");
  }

  std::vector<CoupledTrajectory> trajectories(static_cast<std::size_t>(replicates));
  parallel_replicates(replicates, threads, [&](int rep) {
    RngStream rng(seed, static_cast<std::uint64_t>(rep));
    trajectories[static_cast<std::size_t>(rep)] =
        simulate_coupled_pair(m1, m2, n, horizon, rng);
  });

  int ordered = 0;
  for (const auto& tr : trajectories) ordered += tr.counts_ordered ? 1 : 0;
  std::cout << "replicates=" << replicates << " count_ordering_held=" << ordered << '/'
            << replicates << '\n';

  const FileHeader header{echo, seed};
  const std::string base_path = out.empty() ? "coupled" : out;
  std::vector<BlockCountPath> p1, p2;
  p1.reserve(trajectories.size());
  p2.reserve(trajectories.size());
  for (auto& tr : trajectories) {
    p1.push_back(std::move(tr.path1));
    p2.push_back(std::move(tr.path2));
  }
  write_event_log_csv(base_path + ".lambda1.csv", p1, header);
  write_event_log_csv(base_path + ".lambda2.csv", p2, header);
  std::cout << "wrote " << base_path << ".lambda1.csv and " << base_path
            << ".lambda2.csv\n";
  return kExitPass;
}

int cmd_verify(const std::string& target_name_arg, const MeasureFlags& flags,
               bool measure_given, std::uint64_t seed, int threads, int replicates,
               int n_start, const std::string& out, const std::string& csv_out,
               const std::string& echo) {
  const auto target = parse_target(target_name_arg);
  if (!target) {
    std::cerr << "unknown verification target '" << target_name_arg << "'\n";
    return kExitUsage;
  }
  VerificationConfig config = make_default_config(*target, flags.alpha, seed);
  config.threads = threads;
  if (measure_given && *target != Target::KING) {
    config.measure = flags.build();
    if (*target == Target::T1_1 && config.measure.kind() == MeasureKind::density) {
      config.rel_tol = 0.07;
    }
  }
  if (replicates > 0) config.replicates = replicates;
  if (n_start > 0) config.n_start = n_start;

  const VerificationReport report = run_verification(config);
  for (const auto& m : report.metrics) {
    std::printf("%-6s %-28s estimate=%-12.6g reference=%-12.6g band=%-10.4g %s\n",
                report.target.c_str(), m.name.c_str(), m.estimate, m.reference, m.band,
                m.pass ? "pass" : "FAIL");
  }
  std::printf("%s: %s (%.1fs, %lld replicates, seed %llu)\n", report.target.c_str(),
              report.pass ? "PASS" : "FAIL", report.runtime_seconds, report.replicates,
              static_cast<unsigned long long>(report.seed));

  const std::string json_path = out.empty() ? "verify_" + report.target + ".json" : out;
  {
    std::ofstream f(json_path);
    if (!f) throw std::runtime_error("cannot open " + json_path);
    f << report_to_json(report) << '\n';
  }
  if (!csv_out.empty()) {
    std::ofstream f(csv_out);
    if (!f) throw std::runtime_error("cannot open " + csv_out);
    f << report_to_csv(report);
  }
  std::cout << "wrote " << json_path << '\n';
  return report.pass ? kExitPass : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lambda-coalescent and alpha-stable CSBP simulation toolkit"};
  app.require_subcommand(1);
  const std::string echo = echo_command(argc, argv);

  // rates
  MeasureFlags rates_measure;
  std::vector<int> rates_b{3};
  int rates_max_k = 0;
  std::string rates_out;
  auto* rates_cmd = app.add_subcommand("rates", "merger rates, total rates, jump laws");
  add_measure_flags(rates_cmd, rates_measure);
  rates_cmd->add_option("--b", rates_b, "block counts to tabulate")->required();
  rates_cmd->add_option("--max-k", rates_max_k, "truncate per-b rows (0 = all)");
  rates_cmd->add_option("--out", rates_out, "output CSV (default stdout)");

  // simulate
  MeasureFlags sim_measure;
  int sim_n = 0, sim_to_count = 0, sim_replicates = 1, sim_threads = 0;
  double sim_horizon = 0.0;
  std::uint64_t sim_seed = 0;
  std::vector<double> sim_snapshots;
  std::vector<int> sim_k_hits;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "event-driven coalescent simulation");
  add_measure_flags(sim_cmd, sim_measure);
  sim_cmd->add_option("--n", sim_n, "initial block count")->required();
  sim_cmd->add_option("--t", sim_horizon, "time horizon");
  sim_cmd->add_option("--to-count", sim_to_count, "stop when N <= this");
  sim_cmd->add_option("--replicates", sim_replicates, "independent replicates");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed (mandatory)")->required();
  sim_cmd->add_option("--threads", sim_threads, "worker threads (0 = auto)");
  sim_cmd->add_option("--snapshot-times", sim_snapshots, "partition snapshots at these times");
  sim_cmd->add_option("--k-hits", sim_k_hits, "report T_k and exact-hit fractions");
  sim_cmd->add_option("--out", sim_out, "event log path (default events.csv)");

  // csbp
  double csbp_alpha = 1.5, csbp_a = 1.0, csbp_t = 0.0;
  double csbp_theta0 = 1e5, csbp_step = 0.01;
  int csbp_replicates = 1, csbp_threads = 0;
  bool csbp_time_change = false;
  std::uint64_t csbp_seed = 0;
  std::string csbp_out;
  auto* csbp_cmd = app.add_subcommand("csbp", "alpha-stable CSBP atom systems");
  csbp_cmd->add_option("--alpha", csbp_alpha, "stability index in (1,2)");
  csbp_cmd->add_option("--a", csbp_a, "initial mass");
  csbp_cmd->add_option("--t", csbp_t, "observation time")->required();
  csbp_cmd->add_option("--replicates", csbp_replicates, "independent replicates");
  csbp_cmd->add_option("--seed", csbp_seed, "RNG seed (mandatory)")->required();
  csbp_cmd->add_option("--threads", csbp_threads, "worker threads (0 = auto)");
  csbp_cmd->add_flag("--time-change", csbp_time_change, "also write an R(s) path");
  csbp_cmd->add_option("--grid-theta0", csbp_theta0, "theta at the first grid point");
  csbp_cmd->add_option("--grid-step", csbp_step, "uniform grid step");
  csbp_cmd->add_option("--out", csbp_out, "atom snapshot path (default atoms.csv)");

  // couple
  MeasureFlags couple_measure;
  std::string couple_mode = "scale";
  double couple_factor = 0.5, couple_delta = 0.1, couple_horizon = 1.0;
  int couple_n = 0, couple_replicates = 1, couple_threads = 0;
  std::uint64_t couple_seed = 0;
  std::string couple_out;
  auto* couple_cmd = app.add_subcommand("couple", "coupled pair driven by one atom stream");
  add_measure_flags(couple_cmd, couple_measure);
  couple_cmd->add_option("--mode", couple_mode, "scale|restrict")
      ->check(CLI::IsMember({"scale", "restrict"}));
  couple_cmd->add_option("--factor", couple_factor, "Lambda2 = factor * Lambda1");
  couple_cmd->add_option("--restrict-delta", couple_delta,
                         "Lambda2 = Lambda1 restricted to [0, delta]");
  couple_cmd->add_option("--n", couple_n, "initial block count")->required();
  couple_cmd->add_option("--t", couple_horizon, "time horizon");
  couple_cmd->add_option("--replicates", couple_replicates, "independent replicates");
  couple_cmd->add_option("--seed", couple_seed, "RNG seed (mandatory)")->required();
  couple_cmd->add_option("--threads", couple_threads, "worker threads (0 = auto)");
  couple_cmd->add_option("--out", couple_out, "output prefix (default 'coupled')");

  // verify
  MeasureFlags verify_measure;
  std::string verify_target;
  int verify_replicates = 0, verify_n_start = 0, verify_threads = 0;
  std::uint64_t verify_seed = 0;
  std::string verify_out, verify_csv;
  auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo verification harness");
  verify_cmd->add_option("target", verify_target,
                         "T1.1|T1.2|T1.4|P1.5|P1.6|T1.8|T1.9|DUAL|KING")
      ->required();
  add_measure_flags(verify_cmd, verify_measure);
  verify_cmd->add_option("--seed", verify_seed, "RNG seed (mandatory)")->required();
  verify_cmd->add_option("--replicates", verify_replicates, "override default replicates");
  verify_cmd->add_option("--n-start", verify_n_start, "override default n_start");
  verify_cmd->add_option("--threads", verify_threads, "worker threads (0 = auto)");
  verify_cmd->add_option("--out", verify_out, "JSON report path");
  verify_cmd->add_option("--csv", verify_csv, "flat CSV summary path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (rates_cmd->parsed()) {
      return cmd_rates(rates_measure, rates_b, rates_max_k, rates_out, echo);
    }
    if (sim_cmd->parsed()) {
      if (sim_horizon <= 0.0 && sim_to_count <= 0) {
        throw std::invalid_argument("simulate needs --t or --to-count");
      }
      return cmd_simulate(sim_measure, sim_n, sim_horizon, sim_to_count, sim_replicates,
                          sim_seed, sim_threads, sim_snapshots, sim_k_hits, sim_out, echo);
    }
    if (csbp_cmd->parsed()) {
      return cmd_csbp(csbp_alpha, csbp_a, csbp_t, csbp_replicates, csbp_seed,
                      csbp_threads, csbp_time_change, csbp_theta0, csbp_step, csbp_out,
                      echo);
    }
    if (couple_cmd->parsed()) {
      return cmd_couple(couple_measure, couple_mode, couple_factor, couple_delta,
                        couple_n, couple_horizon, couple_replicates, couple_seed,
                        couple_threads, couple_out, echo);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(verify_target, verify_measure,
                        verify_cmd->count("--measure") > 0 ||
                            verify_cmd->count("--alpha") > 0,
                        verify_seed, verify_threads, verify_replicates, verify_n_start,
                        verify_out, verify_csv, echo);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const coalsim::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
