#pragma once

// Experiment orchestration behind the `aespec` tool: run manifests and
// directories, the RMT verification suite, training, spectral analysis,
// prediction tables and SVG reports. Every command is a plain function so the
// acceptance suite can drive it without a subprocess.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aespec/autoencoder.hpp"
#include "aespec/data.hpp"
#include "aespec/jacobian.hpp"
#include "aespec/spectra.hpp"

namespace aespec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Bad flags, unusable output locations: exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A verification check outside its threshold: exit code 3.
class SuiteFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps an in-flight exception to the documented exit code.
int exit_code_for(const std::exception& e);

// -- manifests and run directories -------------------------------------------

enum class Command { RmtVerify, Train, Analyze, Predict, Report };

const char* command_name(Command c);

struct RunManifest {
  Command command = Command::Predict;
  std::vector<std::uint64_t> seeds;
  std::string dataset;  // directory, "synthetic:<count>:<seed>", or empty
  fs::path output_dir;
  std::vector<std::size_t> latent_dims;
  std::vector<std::size_t> epochs;
  std::size_t workers = 1;
  json options = json::object();  // command-specific settings

  json to_json() const;
  /// "<command>-<16 hex digits>": a hash of everything that determines the
  /// results. The output directory and worker count are excluded.
  std::string run_id() const;
};

/// Creates <output_dir>/<run_id>/ and writes manifest.json into it. An existing
/// run directory is never reused.
fs::path create_run_dir(const RunManifest& manifest);

/// "2..20", "0,1,4,10", "2..4,8": inclusive ranges and single values, in order.
std::vector<std::size_t> parse_index_list(const std::string& text);

/// Runs fn(0..count-1) on up to `workers` threads. Each index is handled once;
/// the first exception thrown is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Writes the file atomically enough for our purposes: to a sibling temp file, then renamed.
void write_text(const fs::path& path, const std::string& text);

// -- datasets ----------------------------------------------------------------

/// Resolves a dataset spec: "synthetic:<count>:<seed>" or an MNIST directory.
/// An empty spec falls back to SPECTRA_DATA_DIR, then to the bundled data/mnist.
data::Dataset load_dataset(const std::string& spec, std::size_t max_samples);

/// The directory an empty dataset spec resolves to.
fs::path default_data_dir();

// -- rmt-verify --------------------------------------------------------------

struct RmtCase {
  std::string law;  // semicircle | circular | product2 | product3 | chain
  std::size_t n;    // matrix order; for chain the smallest dimension (chain n x 2n)
  std::size_t seeds;
};

std::vector<RmtCase> default_rmt_cases();
const std::vector<std::string>& rmt_laws();

/// One row per (law, n, seed). Fields that do not apply to a law are empty.
struct RmtRow {
  std::string law;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<double> ks_sq_modulus;
  std::optional<double> ks_argument;
  std::optional<double> ks_real;
  std::optional<double> radius_estimate;
  std::optional<double> frac_outside;
};

struct RmtCheck {
  std::string law;
  std::size_t n = 0;
  std::size_t seeds = 0;
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  bool upper = true;  // value must be below threshold (else: within a relative band)
  bool pass = false;
};

struct RmtReport {
  std::vector<RmtRow> rows;
  std::vector<RmtCheck> checks;
  std::vector<std::complex<double>> circular_scatter;  // first circular draw

  bool passed() const;
  std::string rows_csv() const;
  std::string checks_csv() const;
  std::string scatter_csv() const;
};

RmtReport run_rmt_suite(const std::vector<RmtCase>& cases, std::size_t workers);

// -- predict -----------------------------------------------------------------

struct PredictionRow {
  std::size_t n1 = 0;
  double median_sq = 0.0;
  double max_sq = 0.0;
  double median_norm = 0.0;
  double max_norm = 0.0;
};

std::vector<PredictionRow> prediction_table(std::size_t first = 2, std::size_t last = 20);
std::string prediction_csv(const std::vector<PredictionRow>& rows);

// -- train -------------------------------------------------------------------

struct TrainOptions {
  std::vector<std::size_t> dims{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  ae::TrainingConfig config;
};

std::string checkpoint_name(std::size_t latent_dim, std::size_t epoch);

/// Trains one network per latent dimension and writes ae_d{d}_e{epoch}.ckpt
/// files plus losses.csv into `run_dir`. Training is sequential.
void run_train(const data::Dataset& dataset, const TrainOptions& options, const fs::path& run_dir,
               std::ostream* log = nullptr);

// -- analyze -----------------------------------------------------------------

inline constexpr int kSummarySchemaVersion = 1;

struct CheckpointRef {
  std::size_t latent_dim;
  std::size_t epoch;
  fs::path path;
};

/// ae_d*_e*.ckpt files in `dir`, sorted by (latent_dim, epoch).
std::vector<CheckpointRef> find_checkpoints(const fs::path& dir);

/// `count` distinct indices below `total`, chosen by a seeded partial shuffle, ascending.
std::vector<std::size_t> sample_indices(std::size_t total, std::size_t count, std::uint64_t seed);

/// Spectrum of J_L (or J_I) at every point, computed on a worker pool and
/// returned in point order.
std::vector<linalg::Spectrum> point_spectra(const ae::AutoencoderParams& params,
                                            const std::vector<std::vector<double>>& points, jac::Which which,
                                            std::size_t workers);

struct AnalyzeOptions {
  fs::path checkpoint_dir;
  std::vector<std::size_t> dims;    // empty: all found
  std::vector<std::size_t> epochs;  // empty: all found
  std::size_t points = 1000;
  std::uint64_t sample_seed = 0;
  jac::Which which = jac::Which::Latent;
  bool dump_eigenvalues = false;
  std::size_t workers = 1;
  std::optional<fs::path> append_csv;
};

std::vector<spectra::SpectralSummary> run_analyze(const data::Dataset& dataset, const AnalyzeOptions& options,
                                                  const std::string& run_id, const fs::path& run_dir,
                                                  std::ostream* log = nullptr);

std::string summary_csv_header();
std::string summary_csv_row(const std::string& run_id, const spectra::SpectralSummary& s);
std::string summary_csv(const std::string& run_id, const std::vector<spectra::SpectralSummary>& rows);

/// Appends rows to an existing summary CSV (or creates it). Refuses a file whose
/// header is not the current schema.
void append_summary_csv(const fs::path& path, const std::string& run_id,
                        const std::vector<spectra::SpectralSummary>& rows);

json summary_json(const std::string& run_id, const std::vector<spectra::SpectralSummary>& rows);
std::vector<spectra::SpectralSummary> parse_summary_json(const json& j);

// -- report ------------------------------------------------------------------

struct BoxCell {
  std::string label;
  spectra::BoxStats stats;
};

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

/// A standalone SVG box plot, one box per cell.
std::string box_plot_svg(const std::string& title, const std::string& y_label, const std::vector<BoxCell>& cells,
                         AxisRange range);

struct ReportOptions {
  fs::path summary_dir;             // directory holding summary.json
  std::vector<std::size_t> dims;    // expected grid; empty: as found
  std::vector<std::size_t> epochs;  // expected grid; empty: as found
};

/// Validates the summary grid, then writes the SVG files into a fresh run
/// directory (created by `make_run_dir` only after validation succeeds).
/// Returns the files written.
std::vector<fs::path> run_report(const ReportOptions& options, const std::function<fs::path()>& make_run_dir);

}  // namespace aespec::cli
