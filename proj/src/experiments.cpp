#include "fairicp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fairicp/cond_density.hpp"
#include "fairicp/errors.hpp"
#include "fairicp/parallel.hpp"
#include "fairicp/rng.hpp"

namespace fairicp {

namespace {

struct TvCell {
  int trial;
  int K0;
  int K;
};

}  // namespace

std::vector<TvStudyRow> run_tv_study(const TvStudyConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("tv study: trials must be >= 1");
  if (cfg.n < 2) throw ConfigError("tv study: n must be >= 2");
  if (cfg.k0_list.empty() || cfg.k_list.empty())
    throw ConfigError("tv study: empty grid");

  std::vector<TvCell> cells;
  for (int trial = 0; trial < cfg.trials; ++trial)
    for (int k0 : cfg.k0_list)
      for (int k : cfg.k_list) cells.push_back({trial, k0, k});

  std::vector<std::pair<TvStudyRow, TvStudyRow>> results(cells.size());
  parallel_for(
      static_cast<int>(cells.size()), cfg.threads, [&](int c) {
        const TvCell& cell = cells[static_cast<std::size_t>(c)];
        // New data, new mixing matrix, and fresh fits every trial.
        const std::uint64_t trial_seed =
            cfg.seed + static_cast<std::uint64_t>(cell.trial);
        const std::uint64_t cell_seed = mix_seed(
            trial_seed, 1000003ULL * cell.K0 + static_cast<std::uint64_t>(cell.K));
        const int p = cell.K0 + cell.K;

        SimSpec spec;
        spec.variant = SimVariant::quality;
        spec.K0 = cell.K0;
        spec.K = cell.K;
        spec.w = cfg.w;
        spec.sigma = cfg.sigma;
        spec.cov_sqrt = make_cov_sqrt(p, 1.0, 5.0, mix_seed(cell_seed, 0x71));
        spec.seed = mix_seed(cell_seed, 0x72);
        const Dataset data = gen_quality_dataset(spec, cfg.n);

        const CondDensity oracle_icp =
            CondDensity::oracle(spec, Direction::y_given_a);
        const RestrictedPermLaw reference =
            restricted_law(oracle_icp, data.A, data.Y, PermMethod::oracle_icp);

        RestrictedPermLaw law_icp, law_cp;
        if (cfg.oracle_estimator) {
          law_icp = reference;
          const CondDensity oracle_cp =
              CondDensity::oracle(spec, Direction::a_given_y);
          law_cp =
              restricted_law(oracle_cp, data.A, data.Y, PermMethod::oracle_cp);
        } else {
          CondDensity q_icp =
              (p == 1)
                  ? fit_y_given_a(data, Penalty::ridge, 0.0)
                  : fit_y_given_a(data, Penalty::lasso,
                                  cfg.lasso_lambda >= 0.0
                                      ? cfg.lasso_lambda
                                      : default_lasso_lambda(data));
          CondDensity q_cp =
              fit_a_given_y(data, p == 1 ? 0.0 : cfg.shrinkage);
          law_icp = restricted_law(q_icp, data.A, data.Y, PermMethod::icp);
          law_cp = restricted_law(q_cp, data.A, data.Y, PermMethod::cp);
        }

        const std::string estimator = cfg.oracle_estimator ? "oracle" : "fit";
        results[static_cast<std::size_t>(c)] = {
            TvStudyRow{cell.trial, cell.K0, cell.K, "icp", estimator,
                       restricted_tv(law_icp, reference)},
            TvStudyRow{cell.trial, cell.K0, cell.K, "cp", estimator,
                       restricted_tv(law_cp, reference)}};
      });

  std::vector<TvStudyRow> rows;
  rows.reserve(2 * results.size());
  for (const auto& pair : results) {
    rows.push_back(pair.first);
    rows.push_back(pair.second);
  }
  std::sort(rows.begin(), rows.end(), [](const TvStudyRow& a,
                                         const TvStudyRow& b) {
    return std::tie(a.trial, a.K0, a.K, a.method) <
           std::tie(b.trial, b.K0, b.K, b.method);
  });
  return rows;
}

std::vector<ParetoRow> run_pareto(const ParetoConfig& cfg) {
  if (cfg.runs < 1) throw ConfigError("pareto: runs must be >= 1");
  if (cfg.sim.variant == SimVariant::quality)
    throw ConfigError("pareto: sim variant must be sim1 or sim2");
  cfg.train.validate();

  std::vector<std::vector<TradeoffPoint>> per_run(
      static_cast<std::size_t>(cfg.runs));
  parallel_for(cfg.runs, cfg.threads, [&](int r) {
    const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(r);

    SimSpec spec = cfg.sim;
    spec.seed = mix_seed(run_seed, 0x11);
    const Dataset train = gen_simulation(spec, cfg.n_train);
    SimSpec test_spec = cfg.sim;
    test_spec.seed = mix_seed(run_seed, 0x12);
    const Dataset test = gen_simulation(test_spec, cfg.n_test);

    const CondDensity q_train =
        cfg.oracle_train_density
            ? CondDensity::oracle(spec, Direction::y_given_a)
            : fit_y_given_a(train, Penalty::lasso,
                            cfg.lasso_lambda >= 0.0
                                ? cfg.lasso_lambda
                                : default_lasso_lambda(train));
    const CondDensity q_test =
        cfg.oracle_test_density
            ? CondDensity::oracle(spec, Direction::y_given_a)
            : q_train;

    TrainConfig run_cfg = cfg.train;
    run_cfg.seed = mix_seed(run_seed, 0x13);

    SweepOptions opts;
    opts.test_copies = cfg.test_copies;
    opts.stat_sweeps = cfg.train.sampler_sweeps;
    opts.q_test = &q_test;
    if (cfg.stat_first_attr_only) opts.stat_attr_cols = {0};

    per_run[static_cast<std::size_t>(r)] =
        sweep_mu(train, test, q_train, cfg.mu_grid, run_cfg, opts);
  });

  std::vector<ParetoRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.runs) * cfg.mu_grid.size());
  for (int r = 0; r < cfg.runs; ++r)
    for (const TradeoffPoint& pt : per_run[static_cast<std::size_t>(r)])
      rows.push_back(ParetoRow{r, pt});
  return rows;
}

std::vector<ParetoSummary> summarize_pareto(const std::vector<ParetoRow>& rows,
                                            double alpha) {
  std::map<double, std::vector<const TradeoffPoint*>> by_mu;
  for (const auto& row : rows) by_mu[row.point.mu].push_back(&row.point);

  std::vector<ParetoSummary> out;
  for (const auto& [mu, pts] : by_mu) {
    ParetoSummary s;
    s.mu = mu;
    const double n = static_cast<double>(pts.size());
    for (const auto* p : pts) {
      s.mean_loss += p->test_loss;
      s.mean_kpc += p->kpc;
      s.mean_p += p->p_value;
      if (p->p_value < alpha) s.power += 1.0;
    }
    s.mean_loss /= n;
    s.mean_kpc /= n;
    s.mean_p /= n;
    s.power /= n;
    for (const auto* p : pts) {
      s.sd_loss += (p->test_loss - s.mean_loss) * (p->test_loss - s.mean_loss);
      s.sd_kpc += (p->kpc - s.mean_kpc) * (p->kpc - s.mean_kpc);
    }
    s.sd_loss = std::sqrt(s.sd_loss / n);
    s.sd_kpc = std::sqrt(s.sd_kpc / n);
    out.push_back(s);
  }
  return out;
}

}  // namespace fairicp
