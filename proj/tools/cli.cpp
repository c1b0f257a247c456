#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "credal/datagen.hpp"
#include "credal/engine.hpp"
#include "credal/errors.hpp"
#include "credal/metrics.hpp"
#include "credal/model_io.hpp"

namespace credal::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string data, source_data, source_model, out, labels_out, scenario, pred, truth;
  std::optional<std::string> label_column;
  std::size_t c = 0, c_source = 0, cap = 0, cap_source = 0;
  std::optional<double> noise_sigma;
  std::string grid, scorer = "silhouette";
  int repeats = 10;
  FitConfig config;
};

void add_fit_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.config.alpha, "Cardinality penalty exponent")->capture_default_str();
  cmd->add_option("--beta", o.config.beta, "Mass exponent (> 1)")->capture_default_str();
  cmd->add_option("--delta", o.config.delta, "Distance to the empty set")->capture_default_str();
  cmd->add_option("--epsilon", o.config.epsilon, "Convergence threshold on |dJ|")->capture_default_str();
  cmd->add_option("--max-iter", o.config.max_iter, "Iteration cap")->capture_default_str();
  cmd->add_option("--cap", o.cap, "Largest focal-set size (0 = all)")->capture_default_str();
  cmd->add_option("--seed", o.config.seed, "Initialisation seed")->capture_default_str();
  cmd->add_option("--label-column", o.label_column, "Ground-truth column (default: y if present)");
}

void add_transfer_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--gamma", o.config.gamma, "Association exponent (> 1)")->capture_default_str();
  cmd->add_option("--source-model", o.source_model, "Source knowledge JSON from `extract`");
  cmd->add_option("--source-data", o.source_data, "Source CSV (knowledge extracted on the fly)");
  cmd->add_option("--c-source", o.c_source, "Source cluster count (with --source-data)");
  cmd->add_option("--cap-source", o.cap_source, "Source focal-set cap (default: --cap)");
}

std::vector<std::string> csv_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cols.push_back(cell);
  }
  return cols;
}

Dataset load(const std::string& path, const Options& o) {
  std::optional<std::string> label = o.label_column;
  if (!label) {
    const auto header = csv_header(path);
    if (std::find(header.begin(), header.end(), "y") != header.end()) label = "y";
  }
  return read_dataset_csv(path, label);
}

FitConfig fit_config(const Options& o) {
  FitConfig cfg = o.config;
  cfg.max_cardinality = o.cap;
  return cfg;
}

SourceKnowledge load_source(const Options& o) {
  if (!o.source_model.empty() && !o.source_data.empty())
    throw CLI::ValidationError("give either --source-model or --source-data, not both");
  if (!o.source_model.empty()) return read_knowledge(o.source_model);
  if (o.source_data.empty())
    throw CLI::ValidationError("one of --source-model or --source-data is required");
  if (o.c_source == 0) throw CLI::ValidationError("--c-source is required with --source-data");
  FitConfig cfg = fit_config(o);
  cfg.max_cardinality = o.cap_source ? o.cap_source : o.cap;
  return extract_source_knowledge(load(o.source_data, o), o.c_source, cfg);
}

Json summary(const std::string& command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

void add_scores(Json& j, const Dataset& data, const ClusterModel& model) {
  if (!data.labels) return;
  const HardAssignment hard = harden(model.partition, model.structure);
  const std::vector<int> pred(hard.labels.begin(), hard.labels.end());
  const EvaluationReport r = evaluate(pred, *data.labels);
  j["ac"] = r.ac;
  j["ri"] = r.ri;
  j["nmi"] = r.nmi;
}

Json report_fit(const std::string& command, const Dataset& data, const ClusterModel& model,
                const Options& o) {
  if (!o.out.empty()) write_model(to_document(model), o.out);
  if (!o.labels_out.empty())
    write_assignment_csv(harden(model.partition, model.structure), model.partition, o.labels_out);
  Json j = summary(command);
  j["objective"] = model.objective_trace.empty() ? 0.0 : model.objective_trace.back();
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  if (model.regularized_solves) j["regularized_solves"] = model.regularized_solves;
  add_scores(j, data, model);
  return j;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) return default_lambda_grid();
  std::vector<double> grid;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size())
      throw CLI::ValidationError("--grid: not a number: '" + cell + "'");
    grid.push_back(v);
  }
  return grid;
}

GridSearchResult run_grid(const Options& o, const Dataset& data, Scorer& scorer) {
  if (o.c == 0) throw CLI::ValidationError("--c is required");
  if (o.repeats < 1) throw CLI::ValidationError("--repeats must be >= 1");
  scorer = o.scorer == "ac" ? Scorer::accuracy : Scorer::silhouette;
  GridSearchOptions opts;
  opts.grid = parse_grid(o.grid);
  opts.scorer = scorer;
  for (int k = 0; k < o.repeats; ++k) opts.seeds.push_back(o.config.seed + static_cast<std::uint64_t>(k));
  return grid_search_lambda(data, o.c, load_source(o), fit_config(o), opts);
}

void apply_thread_cap() {
  if (const char* env = std::getenv("CREDAL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evidential c-means clustering with source-domain transfer", "credal"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Sample a built-in synthetic scenario to CSV");
  gen->add_option("--scenario", o.scenario, "Scenario name, e.g. T1-1")->required();
  gen->add_option("--seed", o.config.seed, "Sampling seed")->capture_default_str();
  gen->add_option("--noise-sigma", o.noise_sigma, "Override additive noise level");
  gen->add_option("--out", o.out, "Output CSV")->required();

  auto* fit_ecm = app.add_subcommand("fit-ecm", "Fit ECM on target data");
  fit_ecm->add_option("--data", o.data, "Input CSV")->required();
  fit_ecm->add_option("--c", o.c, "Cluster count")->required();
  add_fit_flags(fit_ecm, o);
  fit_ecm->add_option("--out", o.out, "Model JSON");
  fit_ecm->add_option("--labels-out", o.labels_out, "Hardened labels CSV");

  auto* extract = app.add_subcommand("extract", "Learn source knowledge (barycenters) with ECM");
  extract->add_option("--source-data", o.source_data, "Source CSV")->required();
  extract->add_option("--c-source", o.c_source, "Source cluster count")->required();
  add_fit_flags(extract, o);
  extract->add_option("--out", o.out, "Knowledge JSON")->required();

  auto* fit_tecm = app.add_subcommand("fit-tecm", "Fit TECM on target data with source knowledge");
  fit_tecm->add_option("--data", o.data, "Target CSV")->required();
  fit_tecm->add_option("--c", o.c, "Target cluster count")->required();
  fit_tecm->add_option("--lambda", o.config.lambda, "Transfer weight")->capture_default_str();
  add_fit_flags(fit_tecm, o);
  add_transfer_flags(fit_tecm, o);
  fit_tecm->add_option("--out", o.out, "Model JSON");
  fit_tecm->add_option("--labels-out", o.labels_out, "Hardened labels CSV");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predicted labels against ground truth");
  evaluate_cmd->add_option("--pred", o.pred, "Labels CSV (column 'label' or first column)")->required();
  evaluate_cmd->add_option("--truth", o.truth, "Labelled data CSV")->required();
  evaluate_cmd->add_option("--label-column", o.label_column, "Truth column (default y)");
  evaluate_cmd->add_option("--out", o.out, "Report JSON");

  CLI::App* grid_cmds[2];
  grid_cmds[0] = app.add_subcommand("gridsearch", "Select lambda over a grid");
  grid_cmds[1] = app.add_subcommand("sweep-lambda", "Mean/std score per lambda as CSV");
  for (auto* cmd : grid_cmds) {
    cmd->add_option("--data", o.data, "Target CSV")->required();
    cmd->add_option("--c", o.c, "Target cluster count")->required();
    cmd->add_option("--grid", o.grid, "Comma-separated lambda values (default: 0,0.1,...,1000)");
    cmd->add_option("--scorer", o.scorer, "silhouette or ac")
        ->check(CLI::IsMember({"silhouette", "ac"}))
        ->capture_default_str();
    cmd->add_option("--repeats", o.repeats, "Seeds per lambda")->capture_default_str();
    add_fit_flags(cmd, o);
    add_transfer_flags(cmd, o);
    cmd->add_option("--out", o.out, cmd == grid_cmds[0] ? "Report JSON" : "Curve CSV");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  apply_thread_cap();
  try {
    Json result;
    if (*gen) {
      ScenarioSpec spec = builtin_scenario(o.scenario);
      spec.seed = o.config.seed;
      if (o.noise_sigma) spec.noise_sigma = *o.noise_sigma;
      const Dataset data = generate(spec);
      write_dataset_csv(data, o.out);
      result = summary("generate");
      result["scenario"] = spec.name;
      result["rows"] = data.size();
      result["dims"] = data.dims();
    } else if (*fit_ecm) {
      const Dataset data = load(o.data, o);
      result = report_fit("fit-ecm", data, ecm_fit(data, o.c, fit_config(o)), o);
    } else if (*extract) {
      const SourceKnowledge k = extract_source_knowledge(load(o.source_data, o), o.c_source, fit_config(o));
      write_knowledge(k, o.out);
      result = summary("extract");
      result["clusters"] = k.structure.clusters();
      result["barycenters"] = k.barycenters.rows();
    } else if (*fit_tecm) {
      const Dataset data = load(o.data, o);
      const SourceKnowledge source = load_source(o);
      result = report_fit("fit-tecm", data, tecm_fit(data, o.c, source, fit_config(o)), o);
    } else if (*evaluate_cmd) {
      const std::vector<int> pred = read_labels_csv(o.pred);
      const Dataset truth = read_dataset_csv(o.truth, o.label_column.value_or("y"));
      const EvaluationReport r = evaluate(pred, *truth.labels);
      result = summary("evaluate");
      result["ac"] = r.ac;
      result["ri"] = r.ri;
      result["nmi"] = r.nmi;
      Json matching = Json::object();
      for (const auto& [cluster, label] : r.matching) matching[std::to_string(cluster)] = label;
      result["matching"] = matching;
      if (!o.out.empty()) std::ofstream(o.out) << result.dump(2) << "\n";
    } else {
      const bool sweep = static_cast<bool>(*grid_cmds[1]);
      const Dataset data = load(o.data, o);
      Scorer scorer;
      const GridSearchResult grid = run_grid(o, data, scorer);
      if (!o.out.empty()) {
        std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
        if (!file) throw FormatError("cannot write '" + o.out + "'");
        if (sweep) {
          file << "lambda,mean,std\n";
          for (const auto& cell : grid.cells)
            file << format_double(cell.lambda) << ',' << format_double(cell.mean) << ','
                 << format_double(cell.stddev) << '\n';
        } else {
          file << grid_report_to_json(grid, scorer);
        }
      }
      result = summary(sweep ? "sweep-lambda" : "gridsearch");
      result["scorer"] = o.scorer;
      result["best_lambda"] = grid.best_lambda;
      for (const auto& cell : grid.cells)
        if (cell.lambda == grid.best_lambda) result["best_score"] = cell.mean;
      result["cells"] = grid.cells.size();
    }
    out << result.dump() << "\n";
    return 0;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const FitDegenerate& e) {
    err << "error: fit degenerate: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace credal::cli
