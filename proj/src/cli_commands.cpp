#include "fairicp/cli_commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "fairicp/csv.hpp"
#include "fairicp/eo_test.hpp"
#include "fairicp/errors.hpp"
#include "fairicp/experiments.hpp"
#include "fairicp/rng.hpp"

namespace fairicp::cli {

namespace {

using nlohmann::json;

void require_version(const json& config) {
  if (!config.is_object()) throw ConfigError("config: expected a JSON object");
  if (!config.contains("version") || config["version"].get<int>() != 1)
    throw ConfigError("config: missing or unsupported \"version\" (expect 1)");
}

template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

SimVariant parse_variant(const std::string& s) {
  if (s == "quality") return SimVariant::quality;
  if (s == "sim1") return SimVariant::sim1;
  if (s == "sim2") return SimVariant::sim2;
  throw ConfigError("config: unknown sim variant '" + s + "'");
}

std::string variant_name(SimVariant v) {
  switch (v) {
    case SimVariant::quality: return "quality";
    case SimVariant::sim1: return "sim1";
    case SimVariant::sim2: return "sim2";
  }
  return "quality";
}

SimSpec parse_sim(const json& j) {
  SimSpec spec;
  spec.variant = parse_variant(get_or<std::string>(j, "variant", "quality"));
  spec.K0 = get_or(j, "K0", 1);
  spec.K = get_or(j, "K", 0);
  spec.w = get_or(j, "w", 0.6);
  spec.sigma = get_or(j, "sigma", 1.0);
  spec.validate();
  return spec;
}

json sim_to_json(const SimSpec& spec) {
  return json{{"variant", variant_name(spec.variant)},
              {"K0", spec.K0},
              {"K", spec.K},
              {"w", spec.w},
              {"sigma", spec.sigma}};
}

CsvSchema parse_schema(const json& j) {
  CsvSchema schema;
  schema.features = get_or(j, "features", std::vector<std::string>{});
  if (j.contains("attributes")) {
    for (const auto& a : j.at("attributes")) {
      CsvSchema::Column col;
      col.name = a.at("name").get<std::string>();
      col.levels = get_or(a, "levels", std::vector<std::string>{});
      schema.attributes.push_back(std::move(col));
    }
  }
  if (schema.attributes.empty())
    throw ConfigError("schema: at least one attribute column is required");
  if (!j.contains("response"))
    throw ConfigError("schema: missing response column");
  schema.response.name = j.at("response").at("name").get<std::string>();
  schema.response.levels =
      get_or(j.at("response"), "levels", std::vector<std::string>{});
  return schema;
}

json schema_to_json(const CsvSchema& schema) {
  json attrs = json::array();
  for (const auto& a : schema.attributes)
    attrs.push_back({{"name", a.name}, {"levels", a.levels}});
  return json{{"features", schema.features},
              {"attributes", std::move(attrs)},
              {"response",
               {{"name", schema.response.name},
                {"levels", schema.response.levels}}}};
}

TrainConfig parse_train(const json& j) {
  TrainConfig cfg;
  cfg.mu = get_or(j, "mu", 0.0);
  cfg.alpha = get_or(j, "alpha", 1e-2);
  cfg.disc_alpha = get_or(j, "disc_alpha", 1e-3);
  cfg.n_g = get_or(j, "n_g", 1);
  cfg.epochs = get_or(j, "epochs", 50);
  cfg.batch = get_or(j, "batch", 32);
  cfg.sampler_sweeps = get_or(j, "sampler_sweeps", 50);
  cfg.hidden = get_or(j, "hidden", 64);
  const std::string opt = get_or<std::string>(j, "optimizer", "sgd");
  if (opt == "sgd")
    cfg.optimizer = OptimizerKind::sgd;
  else if (opt == "adam")
    cfg.optimizer = OptimizerKind::adam;
  else
    throw ConfigError("config: unknown optimizer '" + opt + "'");
  const std::string arch = get_or<std::string>(j, "arch", "linear");
  if (arch == "linear")
    cfg.arch = PredictorArch::linear;
  else if (arch == "mlp")
    cfg.arch = PredictorArch::mlp;
  else
    throw ConfigError("config: unknown arch '" + arch + "'");
  cfg.validate();
  return cfg;
}

json train_to_json(const TrainConfig& cfg) {
  return json{
      {"mu", cfg.mu},
      {"alpha", cfg.alpha},
      {"disc_alpha", cfg.disc_alpha},
      {"n_g", cfg.n_g},
      {"epochs", cfg.epochs},
      {"batch", cfg.batch},
      {"sampler_sweeps", cfg.sampler_sweeps},
      {"hidden", cfg.hidden},
      {"optimizer", cfg.optimizer == OptimizerKind::sgd ? "sgd" : "adam"},
      {"arch", cfg.arch == PredictorArch::linear ? "linear" : "mlp"}};
}

std::filesystem::path prepare_out_dir(const json& config,
                                      const Overrides& overrides) {
  std::string out = overrides.out.empty()
                        ? get_or<std::string>(config, "out", "")
                        : overrides.out;
  if (out.empty()) throw ConfigError("config: missing output directory");
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw RuntimeError("cannot create output directory '" + out + "'");
  return dir;
}

std::uint64_t resolve_seed(const json& config, const Overrides& overrides) {
  if (overrides.seed >= 0) return static_cast<std::uint64_t>(overrides.seed);
  return get_or<std::uint64_t>(config, "seed", 0);
}

int resolve_threads(const json& config, const Overrides& overrides) {
  const int t = overrides.threads > 0 ? overrides.threads
                                      : get_or(config, "threads", 1);
  if (t < 1) throw ConfigError("config: threads must be >= 1");
  return t;
}

std::string write_resolved_config(const std::filesystem::path& dir,
                                  const std::string& command,
                                  const json& resolved) {
  const std::filesystem::path path = dir / (command + ".resolved.json");
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  out << resolved.dump(2) << "\n";
  return path.string();
}

Dataset load_dataset(const json& config, std::uint64_t seed) {
  if (config.contains("data") && config.at("data").contains("csv")) {
    const auto& d = config.at("data");
    return load_csv(d.at("csv").get<std::string>(),
                    parse_schema(d.at("schema")));
  }
  if (config.contains("sim")) {
    SimSpec spec = parse_sim(config.at("sim"));
    spec.seed = mix_seed(seed, 0x20);
    const int n = get_or(config, "n", 500);
    return spec.variant == SimVariant::quality ? gen_quality_dataset(spec, n)
                                               : gen_simulation(spec, n);
  }
  throw ConfigError("config: need either \"data\": {csv, schema} or \"sim\"");
}

CondDensity fit_density(const json& density, const Dataset& train,
                        const SimSpec* sim) {
  const std::string kind = get_or<std::string>(density, "kind", "lasso");
  if (kind == "oracle") {
    if (sim == nullptr)
      throw ConfigError("density: oracle requires a sim data source");
    return CondDensity::oracle(*sim, Direction::y_given_a);
  }
  if (kind == "model") {
    const std::string path = density.at("path").get<std::string>();
    std::ifstream in(path);
    if (!in) throw RuntimeError("density: cannot open '" + path + "'");
    json doc;
    in >> doc;
    return CondDensity::from_json(doc);
  }
  if (train.task == TaskKind::classification)
    return fit_y_given_a_classifier(train, get_or(density, "lambda", 1e-3));
  const double lambda =
      density.contains("lambda") && !density.at("lambda").is_null()
          ? density.at("lambda").get<double>()
          : default_lasso_lambda(train);
  if (kind == "ridge") return fit_y_given_a(train, Penalty::ridge, lambda);
  if (kind == "lasso") return fit_y_given_a(train, Penalty::lasso, lambda);
  throw ConfigError("density: unknown kind '" + kind + "'");
}

json density_resolved(const json& density, const Dataset& train) {
  json out = density.is_object() ? density : json::object();
  const std::string kind = get_or<std::string>(out, "kind", "lasso");
  out["kind"] = kind;
  if ((kind == "lasso" || kind == "ridge") &&
      (!out.contains("lambda") || out.at("lambda").is_null())) {
    out["lambda"] = train.task == TaskKind::classification
                        ? 1e-3
                        : default_lasso_lambda(train);
    out["lambda_rule"] = "0.01 * max |phi_j . (y - mean y)| / n";
  }
  return out;
}

// ---------------------------------------------------------------- gen-data

std::vector<std::string> cmd_gen_data(const json& config,
                                      const Overrides& overrides) {
  const auto dir = prepare_out_dir(config, overrides);
  const std::uint64_t seed = resolve_seed(config, overrides);
  if (!config.contains("sim"))
    throw ConfigError("gen-data: config needs a \"sim\" block");
  SimSpec spec = parse_sim(config.at("sim"));
  spec.seed = mix_seed(seed, 0x20);
  const int n = get_or(config, "n", 500);
  const Dataset full = spec.variant == SimVariant::quality
                           ? gen_quality_dataset(spec, n)
                           : gen_simulation(spec, n);

  json resolved{{"version", 1},       {"command", "gen-data"},
                {"sim", sim_to_json(spec)}, {"n", n},
                {"seed", seed},       {"out", dir.string()}};

  std::vector<std::string> written;
  if (config.contains("split") && !config.at("split").is_null()) {
    const double frac = config.at("split").at("train_frac").get<double>();
    const auto [train, test] = split(full, frac, mix_seed(seed, 0x21));
    const auto train_path = (dir / "train.csv").string();
    const auto test_path = (dir / "test.csv").string();
    save_csv(train, train_path);
    save_csv(test, test_path);
    resolved["split"] = {{"train_frac", frac},
                         {"n_train", train.n()},
                         {"n_test", test.n()}};
    written = {train_path, test_path};
  } else {
    const auto path = (dir / "data.csv").string();
    save_csv(full, path);
    written = {path};
  }
  written.push_back(write_resolved_config(dir, "gen-data", resolved));
  return written;
}

// ---------------------------------------------------------------- tv-study

std::vector<std::string> cmd_tv_study(const json& config,
                                      const Overrides& overrides) {
  const auto dir = prepare_out_dir(config, overrides);
  TvStudyConfig cfg;
  cfg.seed = resolve_seed(config, overrides);
  cfg.threads = resolve_threads(config, overrides);
  if (config.contains("quality")) {
    const auto& q = config.at("quality");
    cfg.k0_list = get_or(q, "K0", cfg.k0_list);
    cfg.k_list = get_or(q, "K", cfg.k_list);
    cfg.w = get_or(q, "w", cfg.w);
    cfg.sigma = get_or(q, "sigma", cfg.sigma);
    cfg.n = get_or(q, "n", cfg.n);
  }
  cfg.trials = get_or(config, "trials", cfg.trials);
  cfg.oracle_estimator =
      get_or<std::string>(config, "estimator", "fit") == "oracle";
  cfg.shrinkage = get_or(config, "shrinkage", cfg.shrinkage);
  if (config.contains("lasso_lambda") && !config.at("lasso_lambda").is_null())
    cfg.lasso_lambda = config.at("lasso_lambda").get<double>();

  const auto rows = run_tv_study(cfg);

  std::vector<std::vector<std::string>> table;
  table.reserve(rows.size());
  for (const auto& r : rows) {
    table.push_back({std::to_string(r.trial), std::to_string(r.K0),
                     std::to_string(r.K), r.method, r.estimator,
                     format_double(r.tv), format_double(std::log10(r.tv))});
  }
  const auto csv_path = (dir / "tv_study.csv").string();
  write_table(csv_path,
              {"trial", "K0", "K", "method", "estimator", "tv", "log10_tv"},
              table);

  json resolved{{"version", 1},
                {"command", "tv-study"},
                {"quality",
                 {{"K0", cfg.k0_list},
                  {"K", cfg.k_list},
                  {"w", cfg.w},
                  {"sigma", cfg.sigma},
                  {"n", cfg.n}}},
                {"trials", cfg.trials},
                {"estimator", cfg.oracle_estimator ? "oracle" : "fit"},
                {"shrinkage", cfg.shrinkage},
                {"lasso_lambda",
                 cfg.lasso_lambda >= 0.0
                     ? json(cfg.lasso_lambda)
                     : json("0.01 * max |phi_j . (y - mean y)| / n, per trial")},
                {"refit_per_trial", true},
                {"seed", cfg.seed},
                {"threads", cfg.threads},
                {"out", dir.string()}};
  return {csv_path, write_resolved_config(dir, "tv-study", resolved)};
}

// ------------------------------------------------------------------ pareto

std::vector<std::string> cmd_pareto(const json& config,
                                    const Overrides& overrides) {
  const auto dir = prepare_out_dir(config, overrides);
  ParetoConfig cfg;
  cfg.seed = resolve_seed(config, overrides);
  cfg.threads = resolve_threads(config, overrides);
  if (!config.contains("sim"))
    throw ConfigError("pareto: config needs a \"sim\" block (sim1 or sim2)");
  cfg.sim = parse_sim(config.at("sim"));
  cfg.n_train = get_or(config, "n_train", cfg.n_train);
  cfg.n_test = get_or(config, "n_test", cfg.n_test);
  cfg.mu_grid = get_or(config, "mu_grid", cfg.mu_grid);
  cfg.runs = get_or(config, "runs", cfg.runs);
  if (config.contains("train")) cfg.train = parse_train(config.at("train"));

  const json density = config.contains("density") ? config.at("density")
                                                  : json{{"kind", "lasso"}};
  const std::string density_kind = get_or<std::string>(density, "kind", "lasso");
  cfg.oracle_train_density = density_kind == "oracle";
  if (density.contains("lambda") && !density.at("lambda").is_null())
    cfg.lasso_lambda = density.at("lambda").get<double>();

  if (config.contains("test")) {
    const auto& t = config.at("test");
    cfg.test_copies = get_or(t, "copies", cfg.test_copies);
    cfg.alpha_level = get_or(t, "alpha", cfg.alpha_level);
    cfg.oracle_test_density =
        get_or<std::string>(t, "density", "oracle") == "oracle";
    cfg.stat_first_attr_only = get_or(t, "first_attr_only", false);
  }

  const auto rows = run_pareto(cfg);
  std::vector<std::vector<std::string>> table;
  table.reserve(rows.size());
  for (const auto& r : rows)
    table.push_back({std::to_string(r.run), format_double(r.point.mu),
                     format_double(r.point.test_loss),
                     format_double(r.point.kpc),
                     format_double(r.point.p_value)});
  const auto csv_path = (dir / "pareto.csv").string();
  write_table(csv_path, {"run", "mu", "test_loss", "kpc", "p_value"}, table);

  const auto summary = summarize_pareto(rows, cfg.alpha_level);
  std::vector<std::vector<std::string>> summary_table;
  for (const auto& s : summary)
    summary_table.push_back(
        {format_double(s.mu), format_double(s.mean_loss),
         format_double(s.sd_loss), format_double(s.mean_kpc),
         format_double(s.sd_kpc), format_double(s.mean_p),
         format_double(s.power)});
  const auto summary_path = (dir / "pareto_summary.csv").string();
  write_table(summary_path,
              {"mu", "mean_loss", "sd_loss", "mean_kpc", "sd_kpc", "mean_p",
               "power"},
              summary_table);

  json resolved{{"version", 1},
                {"command", "pareto"},
                {"sim", sim_to_json(cfg.sim)},
                {"n_train", cfg.n_train},
                {"n_test", cfg.n_test},
                {"mu_grid", cfg.mu_grid},
                {"runs", cfg.runs},
                {"train", train_to_json(cfg.train)},
                {"density",
                 {{"kind", density_kind},
                  {"lambda", cfg.lasso_lambda >= 0.0
                                 ? json(cfg.lasso_lambda)
                                 : json("default rule, per run")}}},
                {"test",
                 {{"copies", cfg.test_copies},
                  {"alpha", cfg.alpha_level},
                  {"density", cfg.oracle_test_density ? "oracle" : "fit"},
                  {"first_attr_only", cfg.stat_first_attr_only}}},
                {"seed", cfg.seed},
                {"threads", cfg.threads},
                {"out", dir.string()}};
  return {csv_path, summary_path,
          write_resolved_config(dir, "pareto", resolved)};
}

// ------------------------------------------------------------------- train

std::vector<std::string> cmd_train(const json& config,
                                   const Overrides& overrides) {
  const auto dir = prepare_out_dir(config, overrides);
  const std::uint64_t seed = resolve_seed(config, overrides);
  const Dataset train = load_dataset(config, seed);

  SimSpec sim;
  const bool have_sim = config.contains("sim");
  if (have_sim) {
    sim = parse_sim(config.at("sim"));
    sim.seed = mix_seed(seed, 0x20);
  }
  const json density = config.contains("density") ? config.at("density")
                                                  : json{{"kind", "lasso"}};
  const CondDensity q = fit_density(density, train, have_sim ? &sim : nullptr);

  TrainConfig cfg =
      config.contains("train") ? parse_train(config.at("train")) : TrainConfig{};
  cfg.mu = get_or(config, "mu", cfg.mu);
  cfg.validate();
  cfg.seed = mix_seed(seed, 0x30);

  const TrainResult result = train_fairicp(train, q, cfg);

  const auto pred_path = (dir / "predictor.json").string();
  {
    std::ofstream out(pred_path);
    out << result.predictor.to_json().dump(2) << "\n";
  }
  const auto disc_path = (dir / "discriminator.json").string();
  {
    std::ofstream out(disc_path);
    out << result.discriminator.to_json().dump(2) << "\n";
  }
  const auto density_path = (dir / "density.json").string();
  {
    std::ofstream out(density_path);
    out << q.to_json().dump(2) << "\n";
  }
  std::vector<std::vector<std::string>> history;
  history.reserve(result.history.size());
  for (const auto& h : result.history)
    history.push_back({std::to_string(h.iter), format_double(h.lf),
                       format_double(h.ld), format_double(h.disc_acc)});
  const auto history_path = (dir / "history.csv").string();
  write_table(history_path, {"iteration", "lf", "ld", "disc_acc"}, history);

  json resolved{{"version", 1},
                {"command", "train"},
                {"mu", cfg.mu},
                {"train", train_to_json(cfg)},
                {"density", density_resolved(density, train)},
                {"seed", seed},
                {"out", dir.string()}};
  if (have_sim) {
    resolved["sim"] = sim_to_json(sim);
    resolved["n"] = get_or(config, "n", 500);
  }
  return {pred_path, disc_path, density_path, history_path,
          write_resolved_config(dir, "train", resolved)};
}

// ------------------------------------------------------------------- audit

Eigen::MatrixXd load_predictions(const std::string& path, Eigen::Index n,
                                 TaskKind task, int n_classes) {
  CsvSchema schema;
  if (task == TaskKind::regression) {
    schema.features = {"y_hat"};
  } else {
    for (int c = 0; c < n_classes; ++c)
      schema.features.push_back("p" + std::to_string(c));
  }
  schema.attributes.push_back({"_row", {}});
  // Reuse the dataset loader by treating predictions as features; the
  // sentinel attribute/response columns are synthesized below.
  std::ifstream probe(path);
  if (!probe) throw RuntimeError("audit: cannot open '" + path + "'");
  std::string header;
  std::getline(probe, header);
  while (!header.empty() && header[0] == '#') std::getline(probe, header);

  // Plain reader: header + numeric columns named as in `schema.features`.
  std::vector<std::string> names;
  {
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  std::vector<int> idx;
  for (const auto& want : schema.features) {
    auto it = std::find(names.begin(), names.end(), want);
    if (it == names.end())
      throw RuntimeError("audit: predictions file missing column '" + want +
                         "'");
    idx.push_back(static_cast<int>(it - names.begin()));
  }
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(idx.size()));
  std::string line;
  Eigen::Index row = 0;
  while (std::getline(probe, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (row >= n)
      throw RuntimeError("audit: more prediction rows than data rows");
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      try {
        out(row, static_cast<Eigen::Index>(j)) =
            std::stod(cells.at(static_cast<std::size_t>(idx[j])));
      } catch (const std::exception&) {
        throw RuntimeError("audit: bad prediction value at row " +
                           std::to_string(row + 1));
      }
    }
    ++row;
  }
  if (row != n)
    throw RuntimeError("audit: prediction rows (" + std::to_string(row) +
                       ") do not match data rows (" + std::to_string(n) + ")");
  return out;
}

std::vector<std::string> cmd_audit(const json& config,
                                   const Overrides& overrides) {
  const auto dir = prepare_out_dir(config, overrides);
  const std::uint64_t seed = resolve_seed(config, overrides);
  if (!config.contains("data") || !config.contains("schema"))
    throw ConfigError("audit: config needs \"data\" (csv path) and \"schema\"");
  const CsvSchema schema = parse_schema(config.at("schema"));
  const Dataset data = load_csv(config.at("data").get<std::string>(), schema);

  const Eigen::MatrixXd y_hat =
      load_predictions(config.at("predictions").get<std::string>(), data.n(),
                       data.task, data.n_classes);

  const json density = config.contains("density") ? config.at("density")
                                                  : json{{"kind", "lasso"}};
  const CondDensity q = fit_density(density, data, nullptr);

  EoTestOptions opts;
  int copies = 100;
  double alpha = 0.05;
  if (config.contains("test")) {
    const auto& t = config.at("test");
    copies = get_or(t, "copies", copies);
    alpha = get_or(t, "alpha", alpha);
    opts.sweeps = get_or(t, "sweeps", opts.sweeps);
    opts.stat_attr_cols = get_or(t, "stat_attr_cols", std::vector<int>{});
  }

  EoInputs in;
  in.y_hat = y_hat;
  in.A = data.A;
  in.a_cols = data.a_cols;
  in.y = data.Y;
  in.task = data.task;
  in.n_classes = data.n_classes;
  const EoTestResult result = eo_test(in, q, copies, mix_seed(seed, 0x40), opts);

  const Eigen::MatrixXd V =
      statistic_attr_encoding(data.A, data.a_cols, opts.stat_attr_cols);
  const Eigen::MatrixXd W =
      statistic_response_encoding(data.Y, data.task, data.n_classes);
  const double kpc = kpc_estimate(y_hat, V, W, opts.kpc);

  json t_null = json::array();
  for (double t : result.t_null) t_null.push_back(t);
  json out_doc{{"t_star", result.t_star},
               {"t_null", std::move(t_null)},
               {"p_value", result.p_value},
               {"K", result.copies},
               {"seed", seed},
               {"statistic_tag", result.statistic_tag},
               {"kpc", kpc},
               {"alpha", alpha},
               {"reject", result.p_value < alpha},
               {"note",
                "p-value validity depends on how well the fitted conditional "
                "density matches the data; the kpc field does not depend on "
                "the density"}};
  const auto json_path = (dir / "audit.json").string();
  {
    std::ofstream out(json_path);
    out << out_doc.dump(2) << "\n";
  }

  json resolved{{"version", 1},
                {"command", "audit"},
                {"data", config.at("data")},
                {"predictions", config.at("predictions")},
                {"schema", schema_to_json(schema)},
                {"density", density_resolved(density, data)},
                {"test",
                 {{"copies", copies},
                  {"alpha", alpha},
                  {"sweeps", opts.sweeps},
                  {"stat_attr_cols", opts.stat_attr_cols}}},
                {"seed", seed},
                {"out", dir.string()}};
  return {json_path, write_resolved_config(dir, "audit", resolved)};
}

}  // namespace

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw ConfigError("config parse failure: " + std::string(e.what()));
  }
  return config;
}

std::vector<std::string> run_command(const std::string& command,
                                     const nlohmann::json& config,
                                     const Overrides& overrides) {
  require_version(config);
  if (command == "gen-data") return cmd_gen_data(config, overrides);
  if (command == "tv-study") return cmd_tv_study(config, overrides);
  if (command == "pareto") return cmd_pareto(config, overrides);
  if (command == "train") return cmd_train(config, overrides);
  if (command == "audit") return cmd_audit(config, overrides);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace fairicp::cli
