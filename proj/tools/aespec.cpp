#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include "aespec/cli.hpp"

using namespace aespec;
using namespace aespec::cli;

namespace {

struct Common {
  std::string out = "runs";
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Root directory for run outputs")->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads for per-point work")->check(CLI::PositiveNumber);
}

// Last component of a directory path; run directories are named by content hash.
std::string dir_label(const std::string& dir) {
  auto p = fs::absolute(dir).lexically_normal();
  if (!p.has_filename()) p = p.parent_path();
  return p.filename().string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-matrix spectra of autoencoder latent Jacobians"};
  app.require_subcommand(1);

  // rmt-verify
  Common rmt_common;
  std::string law = "all";
  std::size_t rmt_n = 0, rmt_seeds = 0;
  auto* rmt_cmd = app.add_subcommand("rmt-verify", "Check sampled spectra against the limiting laws");
  add_common(rmt_cmd, rmt_common);
  rmt_cmd->add_option("--law", law, "all, semicircle, circular, product2, product3 or chain")->capture_default_str();
  rmt_cmd->add_option("--n", rmt_n, "Matrix order (chain: smallest dimension of an n x 2n chain)");
  rmt_cmd->add_option("--seeds", rmt_seeds, "Number of seeds per case");

  // train
  Common train_common;
  std::string train_data, train_dims = "2..20", train_checkpoints = "0,1,4,10,50,300", optimizer = "adam";
  std::size_t train_epochs = 300, train_samples = 0;
  TrainOptions train_opts;
  bool train_desk = false;
  auto* train_cmd = app.add_subcommand("train", "Train one autoencoder per latent dimension, writing checkpoints");
  add_common(train_cmd, train_common);
  train_cmd->add_option("--data", train_data, "MNIST directory or synthetic:<count>:<seed> (default: $SPECTRA_DATA_DIR)");
  auto* dims_opt = train_cmd->add_option("--dims", train_dims, "Latent dimensions, e.g. 2..20 or 2,4,8")->capture_default_str();
  auto* epochs_opt = train_cmd->add_option("--epochs", train_epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--checkpoints", train_checkpoints, "Checkpoint epochs")->capture_default_str();
  auto* samples_opt = train_cmd->add_option("--samples", train_samples, "Use only the first N training images (0: all)");
  train_cmd->add_option("--seed", train_opts.config.seed, "Initialisation and shuffling seed")->capture_default_str();
  train_cmd->add_option("--batch-size", train_opts.config.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train_opts.config.learning_rate)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--optimizer", optimizer)->check(CLI::IsMember({"adam", "sgd"}))->capture_default_str();
  train_cmd->add_flag("--desk", train_desk, "Desk-scale grid: d in {2,4,8,16}, 10 epochs, 10k samples");

  // analyze
  Common analyze_common;
  std::string analyze_data, analyze_dims, analyze_epochs, append;
  std::string checkpoints_dir;
  std::size_t points = 1000;
  std::uint64_t sample_seed = 0;
  bool analyze_desk = false, dump = false, input_jacobian = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Summarise latent Jacobian spectra for each checkpoint");
  add_common(analyze_cmd, analyze_common);
  analyze_cmd->add_option("--checkpoints", checkpoints_dir, "Directory with ae_d*_e*.ckpt files")->required();
  analyze_cmd->add_option("--data", analyze_data, "MNIST directory or synthetic:<count>:<seed> (default: $SPECTRA_DATA_DIR)");
  analyze_cmd->add_option("--dims", analyze_dims, "Only these latent dimensions");
  analyze_cmd->add_option("--epochs", analyze_epochs, "Only these epochs");
  auto* points_opt = analyze_cmd->add_option("--points", points, "Data points per cell")->capture_default_str();
  analyze_cmd->add_option("--sample-seed", sample_seed, "Seed for choosing the data points")->capture_default_str();
  analyze_cmd->add_flag("--dump-eigenvalues", dump, "Also write every eigenvalue to eigs_d*_e*.csv");
  analyze_cmd->add_flag("--input-jacobian", input_jacobian, "Analyse the 784x784 input Jacobian instead of J_L");
  analyze_cmd->add_option("--append", append, "Also append the rows to this summary CSV (header must match)");
  analyze_cmd->add_flag("--desk", analyze_desk, "Desk-scale analysis: 300 points per cell");

  // predict
  Common predict_common;
  auto* predict_cmd = app.add_subcommand("predict", "Predicted epoch-0 eigenvalue moduli for n1 = 2..20");
  add_common(predict_cmd, predict_common);

  // report
  Common report_common;
  std::string summaries_dir, report_dims, report_epochs;
  auto* report_cmd = app.add_subcommand("report", "Draw SVG box plots from an analyze run");
  add_common(report_cmd, report_common);
  report_cmd->add_option("--summaries", summaries_dir, "Analyze run directory holding summary.json")->required();
  report_cmd->add_option("--dims", report_dims, "Expected latent dimensions (default: as found)");
  report_cmd->add_option("--epochs", report_epochs, "Expected epochs (default: as found)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*rmt_cmd) {
      std::vector<RmtCase> cases;
      for (const auto& c : default_rmt_cases())
        if (law == "all" || c.law == law) cases.push_back(c);
      if (cases.empty()) throw UsageError("unknown law '" + law + "'");
      if (law != "all") {
        // A single law: one case, sized by --n / --seeds when given.
        cases.resize(1);
        if (rmt_n) cases[0].n = rmt_n;
        if (rmt_seeds) cases[0].seeds = rmt_seeds;
      } else if (rmt_n || rmt_seeds) {
        throw UsageError("--n and --seeds need a single --law");
      }
      RunManifest m;
      m.command = Command::RmtVerify;
      m.output_dir = rmt_common.out;
      m.workers = rmt_common.workers;
      for (const auto& c : cases) m.options["cases"].push_back({{"law", c.law}, {"n", c.n}, {"seeds", c.seeds}});
      const auto dir = create_run_dir(m);
      const auto report = run_rmt_suite(cases, rmt_common.workers);
      write_text(dir / "rmt_results.csv", report.rows_csv());
      write_text(dir / "rmt_checks.csv", report.checks_csv());
      if (!report.circular_scatter.empty()) write_text(dir / "circular_scatter.csv", report.scatter_csv());
      std::cout << report.checks_csv();
      std::cout << "wrote " << dir.string() << "\n";
      for (const auto& c : report.checks)
        if (!c.pass) throw SuiteFailure("law " + c.law + " n=" + std::to_string(c.n) + ": " + c.metric + " = " +
                                        std::to_string(c.value) + " (threshold " + std::to_string(c.threshold) + ")");
    } else if (*train_cmd) {
      if (train_desk) {
        if (!dims_opt->count()) train_dims = "2,4,8,16";
        if (!epochs_opt->count()) train_epochs = 10;
        if (!samples_opt->count()) train_samples = 10000;
      }
      train_opts.dims = parse_index_list(train_dims);
      for (std::size_t d : train_opts.dims)
        if (d < ae::kMinLatent || d > ae::kMaxLatent)
          throw UsageError("latent dimension " + std::to_string(d) + " outside 2..20");
      train_opts.config.epochs = train_epochs;
      train_opts.config.checkpoint_epochs = parse_index_list(train_checkpoints);
      if (optimizer == "sgd") train_opts.config.optimizer = ae::Sgd{};
      const auto ds = load_dataset(train_data, train_samples);

      RunManifest m;
      m.command = Command::Train;
      m.seeds = {train_opts.config.seed};
      m.dataset = train_data.empty() ? default_data_dir().string() : train_data;
      m.output_dir = train_common.out;
      m.latent_dims = train_opts.dims;
      m.epochs = train_opts.config.normalized_checkpoints();
      m.workers = train_common.workers;
      m.options = {{"epochs", train_epochs},       {"samples", ds.size()},
                   {"batch_size", train_opts.config.batch_size}, {"learning_rate", train_opts.config.learning_rate},
                   {"optimizer", optimizer}};
      const auto dir = create_run_dir(m);
      run_train(ds, train_opts, dir, &std::cerr);
      std::cout << "wrote " << dir.string() << "\n";
    } else if (*analyze_cmd) {
      if (analyze_desk && !points_opt->count()) points = 300;
      AnalyzeOptions opts;
      opts.checkpoint_dir = checkpoints_dir;
      if (!analyze_dims.empty()) opts.dims = parse_index_list(analyze_dims);
      if (!analyze_epochs.empty()) opts.epochs = parse_index_list(analyze_epochs);
      opts.points = points;
      opts.sample_seed = sample_seed;
      opts.which = input_jacobian ? jac::Which::Input : jac::Which::Latent;
      opts.dump_eigenvalues = dump;
      opts.workers = analyze_common.workers;
      if (!append.empty()) opts.append_csv = append;
      const auto ds = load_dataset(analyze_data, 0);

      RunManifest m;
      m.command = Command::Analyze;
      m.seeds = {sample_seed};
      m.dataset = analyze_data.empty() ? default_data_dir().string() : analyze_data;
      m.output_dir = analyze_common.out;
      m.latent_dims = opts.dims;
      m.epochs = opts.epochs;
      m.workers = analyze_common.workers;
      m.options = {{"checkpoints", dir_label(checkpoints_dir)},
                   {"points", points},
                   {"jacobian", input_jacobian ? "input" : "latent"},
                   {"dump_eigenvalues", dump}};
      const auto dir = create_run_dir(m);
      run_analyze(ds, opts, m.run_id(), dir, &std::cerr);
      std::cout << "wrote " << dir.string() << "\n";
    } else if (*predict_cmd) {
      const auto rows = prediction_table();
      const auto csv = prediction_csv(rows);
      std::cout << csv;
      if (predict_cmd->count("--out")) {
        RunManifest m;
        m.command = Command::Predict;
        m.output_dir = predict_common.out;
        const auto dir = create_run_dir(m);
        write_text(dir / "predictions.csv", csv);
        std::cout << "wrote " << dir.string() << "\n";
      }
    } else if (*report_cmd) {
      ReportOptions opts;
      opts.summary_dir = summaries_dir;
      if (!report_dims.empty()) opts.dims = parse_index_list(report_dims);
      if (!report_epochs.empty()) opts.epochs = parse_index_list(report_epochs);
      RunManifest m;
      m.command = Command::Report;
      m.output_dir = report_common.out;
      m.latent_dims = opts.dims;
      m.epochs = opts.epochs;
      m.options = {{"summaries", dir_label(summaries_dir)}};
      const auto files = run_report(opts, [&] { return create_run_dir(m); });
      for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "aespec: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}
