#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <regex>
#include <sstream>

#include "aespec/cli.hpp"
#include "aespec/rng.hpp"

namespace aespec::cli {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool wanted(const std::vector<std::size_t>& filter, std::size_t v) {
  return filter.empty() || std::find(filter.begin(), filter.end(), v) != filter.end();
}

}  // namespace

// -- train -------------------------------------------------------------------

std::string checkpoint_name(std::size_t latent_dim, std::size_t epoch) {
  return "ae_d" + std::to_string(latent_dim) + "_e" + std::to_string(epoch) + ".ckpt";
}

void run_train(const data::Dataset& dataset, const TrainOptions& options, const fs::path& run_dir, std::ostream* log) {
  if (dataset.size() == 0) throw data::MissingDataError("training dataset is empty");
  std::ostringstream losses;
  losses << "latent_dim,epoch,loss\n";
  for (std::size_t d : options.dims) {
    const auto params = ae::init(d, options.config.seed);
    const auto result = ae::train(params, dataset.points, options.config, [&](const ae::Checkpoint& c) {
      ae::write_checkpoint(run_dir / checkpoint_name(d, c.epoch), c.params, static_cast<std::uint32_t>(c.epoch),
                           options.config.seed);
    });
    for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) {
      losses << d << ',' << e + 1 << ',' << fmt("%.10g", result.epoch_losses[e]) << '\n';
    }
    if (log) {
      *log << "trained d=" << d;
      if (!result.epoch_losses.empty()) *log << " final loss " << fmt("%.6f", result.epoch_losses.back());
      *log << '\n';
    }
  }
  write_text(run_dir / "losses.csv", losses.str());
}

// -- analyze -----------------------------------------------------------------

namespace {
bool check_append_target(const fs::path& path);
}  // namespace

std::vector<CheckpointRef> find_checkpoints(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw data::MissingDataError("checkpoint directory " + dir.string() + " does not exist");
  static const std::regex pattern(R"(ae_d(\d+)_e(\d+)\.ckpt)");
  std::vector<CheckpointRef> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) {
      found.push_back({std::stoul(m[1]), std::stoul(m[2]), entry.path()});
    }
  }
  std::sort(found.begin(), found.end(), [](const CheckpointRef& a, const CheckpointRef& b) {
    return std::tie(a.latent_dim, a.epoch) < std::tie(b.latent_dim, b.epoch);
  });
  return found;
}

std::vector<std::size_t> sample_indices(std::size_t total, std::size_t count, std::uint64_t seed) {
  count = std::min(count, total);
  std::vector<std::size_t> idx(total);
  for (std::size_t i = 0; i < total; ++i) idx[i] = i;
  CounterRng rng = CounterRng(seed).split(0x5a4d504cULL);
  for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(total - i)]);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<linalg::Spectrum> point_spectra(const ae::AutoencoderParams& params,
                                            const std::vector<std::vector<double>>& points, jac::Which which,
                                            std::size_t workers) {
  std::vector<linalg::Spectrum> out(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    out[i] = linalg::eigenvalues(jac::jacobian(params, {which, points[i]}));
  });
  return out;
}

std::vector<spectra::SpectralSummary> run_analyze(const data::Dataset& dataset, const AnalyzeOptions& options,
                                                  const std::string& run_id, const fs::path& run_dir,
                                                  std::ostream* log) {
  std::vector<CheckpointRef> cells;
  for (const auto& c : find_checkpoints(options.checkpoint_dir))
    if (wanted(options.dims, c.latent_dim) && wanted(options.epochs, c.epoch)) cells.push_back(c);
  if (cells.empty()) {
    throw data::MissingDataError("no ae_d*_e*.ckpt checkpoints matching the requested dims/epochs in " +
                                 options.checkpoint_dir.string());
  }
  if (dataset.size() == 0) throw data::MissingDataError("analysis dataset is empty");
  if (options.append_csv) check_append_target(*options.append_csv);

  std::vector<std::vector<double>> points;
  for (std::size_t i : sample_indices(dataset.size(), options.points, options.sample_seed))
    points.push_back(dataset.points[i]);

  std::vector<spectra::SpectralSummary> summaries;
  for (const auto& cell : cells) {
    ae::CheckpointHeader header{};
    const auto params = ae::read_checkpoint(cell.path, &header);
    if (header.latent_dim != cell.latent_dim || header.epoch != cell.epoch) {
      throw ae::FormatError("checkpoint format v1: " + cell.path.filename().string() + " holds d=" +
                            std::to_string(header.latent_dim) + " epoch " + std::to_string(header.epoch) +
                            ", which does not match its file name");
    }
    const auto spectra_at = point_spectra(params, points, options.which, options.workers);
    summaries.push_back(spectra::summarize(spectra_at, cell.epoch, cell.latent_dim));
    if (options.dump_eigenvalues) {
      std::ostringstream os;
      os << "point,index,re,im\n";
      for (std::size_t p = 0; p < spectra_at.size(); ++p)
        for (std::size_t k = 0; k < spectra_at[p].size(); ++k)
          os << p << ',' << k << ',' << fmt("%.17g", spectra_at[p].values[k].real()) << ','
             << fmt("%.17g", spectra_at[p].values[k].imag()) << '\n';
      write_text(run_dir / ("eigs_d" + std::to_string(cell.latent_dim) + "_e" + std::to_string(cell.epoch) + ".csv"),
                 os.str());
    }
    if (log) {
      const auto& s = summaries.back();
      *log << "analyzed d=" << cell.latent_dim << " epoch " << cell.epoch << ": median |lambda| "
           << fmt("%.6g", s.modulus.q[2]) << ", median arg " << fmt("%.4f", s.argument.q[2]) << '\n';
    }
  }

  write_text(run_dir / "summary.csv", summary_csv(run_id, summaries));
  write_text(run_dir / "summary.json", summary_json(run_id, summaries).dump(2) + "\n");
  if (options.append_csv) append_summary_csv(*options.append_csv, run_id, summaries);
  return summaries;
}

// -- summary files -----------------------------------------------------------

std::string summary_csv_header() {
  return "run_id,latent_dim,epoch,n_points,n_eigs,mod_min,mod_q25,mod_med,mod_q75,mod_p95,mod_max,"
         "arg_min,arg_q25,arg_med,arg_q75,arg_p95,arg_max,n_zero_eigs";
}

std::string summary_csv_row(const std::string& run_id, const spectra::SpectralSummary& s) {
  std::ostringstream os;
  os << run_id << ',' << s.latent_dim << ',' << s.epoch << ',' << s.sample_points << ',' << s.eigen_count;
  for (double q : s.modulus.q) os << ',' << fmt("%.10g", q);
  // With every eigenvalue at zero there are no arguments to summarise.
  for (double q : s.argument.q) os << ',' << (s.zero_count == s.eigen_count ? std::string() : fmt("%.10g", q));
  os << ',' << s.zero_count;
  return os.str();
}

std::string summary_csv(const std::string& run_id, const std::vector<spectra::SpectralSummary>& rows) {
  std::string out = summary_csv_header() + "\n";
  for (const auto& s : rows) out += summary_csv_row(run_id, s) + "\n";
  return out;
}

namespace {

// True when `path` exists with the current header; throws on a mismatched one.
bool check_append_target(const fs::path& path) {
  if (!fs::exists(path)) return false;
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != summary_csv_header()) {
    throw data::FormatError("refusing to append to " + path.string() + ": its header does not match summary schema v" +
                            std::to_string(kSummarySchemaVersion));
  }
  return true;
}

}  // namespace

void append_summary_csv(const fs::path& path, const std::string& run_id,
                        const std::vector<spectra::SpectralSummary>& rows) {
  std::string body;
  if (!check_append_target(path)) body = summary_csv_header() + "\n";
  for (const auto& s : rows) body += summary_csv_row(run_id, s) + "\n";
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw UsageError("cannot append to " + path.string());
  out << body;
}

namespace {

json box_json(const spectra::BoxStats& b) {
  return json{{"min", b.q[0]},          {"q25", b.q[1]},
              {"median", b.q[2]},       {"q75", b.q[3]},
              {"p95", b.q[4]},          {"max", b.q[5]},
              {"whisker_low", b.whisker_low}, {"whisker_high", b.whisker_high},
              {"outliers", b.outliers}};
}

spectra::BoxStats box_from_json(const json& j) {
  spectra::BoxStats b;
  b.q = {j.at("min").get<double>(), j.at("q25").get<double>(), j.at("median").get<double>(),
         j.at("q75").get<double>(), j.at("p95").get<double>(), j.at("max").get<double>()};
  b.whisker_low = j.at("whisker_low").get<double>();
  b.whisker_high = j.at("whisker_high").get<double>();
  b.outliers = j.at("outliers").get<std::vector<double>>();
  return b;
}

}  // namespace

json summary_json(const std::string& run_id, const std::vector<spectra::SpectralSummary>& rows) {
  json cells = json::array();
  for (const auto& s : rows) {
    cells.push_back(json{{"latent_dim", s.latent_dim},
                         {"epoch", s.epoch},
                         {"n_points", s.sample_points},
                         {"n_eigs", s.eigen_count},
                         {"n_zero_eigs", s.zero_count},
                         {"modulus", box_json(s.modulus)},
                         {"argument", box_json(s.argument)}});
  }
  return json{{"schema_version", kSummarySchemaVersion}, {"run_id", run_id}, {"cells", cells}};
}

std::vector<spectra::SpectralSummary> parse_summary_json(const json& j) {
  if (!j.contains("schema_version") || j.at("schema_version") != kSummarySchemaVersion) {
    throw data::FormatError("summary.json: unsupported schema_version (expected " +
                            std::to_string(kSummarySchemaVersion) + ")");
  }
  std::vector<spectra::SpectralSummary> out;
  try {
    for (const auto& c : j.at("cells")) {
      spectra::SpectralSummary s;
      s.latent_dim = c.at("latent_dim");
      s.epoch = c.at("epoch");
      s.sample_points = c.at("n_points");
      s.eigen_count = c.at("n_eigs");
      s.zero_count = c.at("n_zero_eigs");
      s.modulus = box_from_json(c.at("modulus"));
      s.argument = box_from_json(c.at("argument"));
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw data::FormatError(std::string("summary.json: ") + e.what());
  }
  return out;
}

}  // namespace aespec::cli
