#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "aespec/cli.hpp"

namespace aespec::cli {

namespace {

constexpr double kLeft = 72.0, kRight = 20.0, kTop = 44.0, kBottom = 52.0;
constexpr double kSlot = 46.0, kBoxWidth = 24.0, kPlotHeight = 300.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Smallest of {1, 2, 2.5, 5, 10} x 10^k at or above x.
double nice_ceiling(double x) {
  if (!(x > 0.0)) return 1.0;
  const double base = std::pow(10.0, std::floor(std::log10(x)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * base >= x * (1.0 - 1e-12)) return m * base;
  return 10.0 * base;
}

}  // namespace

std::string box_plot_svg(const std::string& title, const std::string& y_label, const std::vector<BoxCell>& cells,
                         AxisRange range) {
  const double width = std::max(420.0, kLeft + kSlot * static_cast<double>(cells.size()) + kRight);
  const double height = kTop + kPlotHeight + kBottom;
  const double span = range.hi > range.lo ? range.hi - range.lo : 1.0;
  auto y = [&](double v) {
    const double t = std::clamp((v - range.lo) / span, 0.0, 1.0);
    return kTop + (1.0 - t) * kPlotHeight;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
     << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height) << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  os << "<text transform=\"translate(16," << num(kTop + kPlotHeight / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(y_label) << "</text>\n";

  // axes and gridlines
  const double x0 = kLeft, x1 = width - kRight;
  for (int i = 0; i <= 5; ++i) {
    const double v = range.lo + span * i / 5.0;
    os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y(v)) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y(v))
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(y(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v)
       << "</text>\n";
  }
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\""
     << num(kTop + kPlotHeight) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop + kPlotHeight) << "\" x2=\"" << num(x1) << "\" y2=\""
     << num(kTop + kPlotHeight) << "\" stroke=\"black\"/>\n";

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& b = cells[i].stats;
    const double slot = (x1 - x0) / static_cast<double>(cells.size());
    const double cx = x0 + slot * (static_cast<double>(i) + 0.5);
    const double l = cx - kBoxWidth / 2, r = cx + kBoxWidth / 2;
    os << "<g>\n";
    os << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y(b.whisker_low)) << "\" x2=\"" << num(cx) << "\" y2=\""
       << num(y(b.q[1])) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y(b.q[3])) << "\" x2=\"" << num(cx) << "\" y2=\""
       << num(y(b.whisker_high)) << "\" stroke=\"black\"/>\n";
    for (double w : {b.whisker_low, b.whisker_high}) {
      os << "<line x1=\"" << num(cx - kBoxWidth / 4) << "\" y1=\"" << num(y(w)) << "\" x2=\"" << num(cx + kBoxWidth / 4)
         << "\" y2=\"" << num(y(w)) << "\" stroke=\"black\"/>\n";
    }
    os << "<rect x=\"" << num(l) << "\" y=\"" << num(y(b.q[3])) << "\" width=\"" << num(kBoxWidth) << "\" height=\""
       << num(std::max(0.0, y(b.q[1]) - y(b.q[3]))) << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(l) << "\" y1=\"" << num(y(b.q[2])) << "\" x2=\"" << num(r) << "\" y2=\""
       << num(y(b.q[2])) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    for (double o : b.outliers) {
      os << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(y(o)) << "\" r=\"2\" fill=\"none\" stroke=\"#555555\"/>\n";
    }
    os << "</g>\n";
    os << "<text x=\"" << num(cx) << "\" y=\"" << num(kTop + kPlotHeight + 18) << "\" text-anchor=\"middle\">"
       << escape(cells[i].label) << "</text>\n";
  }
  os << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(height - 10)
     << "\" text-anchor=\"middle\">latent dimension</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::vector<fs::path> run_report(const ReportOptions& options, const std::function<fs::path()>& make_run_dir) {
  const fs::path source = options.summary_dir / "summary.json";
  if (!fs::is_regular_file(source)) {
    throw data::MissingDataError("no summaries: " + source.string() + " not found (run `aespec analyze` first)");
  }
  std::ifstream in(source);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw data::FormatError(source.string() + ": " + e.what());
  }
  const auto summaries = parse_summary_json(j);
  if (summaries.empty()) throw data::MissingDataError("no summaries: " + source.string() + " has no cells");

  std::map<std::pair<std::size_t, std::size_t>, const spectra::SpectralSummary*> grid;  // (epoch, d)
  std::set<std::size_t> found_dims, found_epochs;
  for (const auto& s : summaries) {
    if (!grid.emplace(std::make_pair(s.epoch, s.latent_dim), &s).second) {
      throw data::FormatError("duplicate summary cell d=" + std::to_string(s.latent_dim) + " epoch " +
                              std::to_string(s.epoch));
    }
    found_dims.insert(s.latent_dim);
    found_epochs.insert(s.epoch);
  }
  auto dims = options.dims.empty() ? std::vector<std::size_t>(found_dims.begin(), found_dims.end()) : options.dims;
  auto epochs =
      options.epochs.empty() ? std::vector<std::size_t>(found_epochs.begin(), found_epochs.end()) : options.epochs;

  std::string missing;
  for (std::size_t e : epochs)
    for (std::size_t d : dims)
      if (!grid.count({e, d})) missing += " (d=" + std::to_string(d) + ", epoch " + std::to_string(e) + ")";
  if (!missing.empty()) throw data::MissingDataError("missing summary cells:" + missing);

  auto cells_for = [&](std::size_t e, bool modulus) {
    std::vector<BoxCell> cells;
    for (std::size_t d : dims) {
      const auto* s = grid.at({e, d});
      cells.push_back({std::to_string(d), modulus ? s->modulus : s->argument});
    }
    return cells;
  };
  double shared_max = 0.0;
  for (std::size_t e : epochs)
    for (std::size_t d : dims) shared_max = std::max(shared_max, grid.at({e, d})->modulus.q[5]);
  const AxisRange shared{0.0, nice_ceiling(shared_max)};
  const AxisRange angle{0.0, std::numbers::pi};

  std::vector<std::pair<fs::path, std::string>> files;
  for (std::size_t e : epochs) {
    const std::string tag = "e" + std::to_string(e);
    files.emplace_back("moduli_" + tag + ".svg", box_plot_svg("|λ| of J_L, epoch " + std::to_string(e),
                                                              "|λ|", cells_for(e, true), shared));
    files.emplace_back("arguments_" + tag + ".svg",
                       box_plot_svg("folded argument of J_L eigenvalues, epoch " + std::to_string(e),
                                    "argument (radians)", cells_for(e, false), angle));
  }
  if (std::find(epochs.begin(), epochs.end(), 0) != epochs.end()) {
    double e0_max = 0.0;
    for (std::size_t d : dims) e0_max = std::max(e0_max, grid.at({0, d})->modulus.q[5]);
    files.emplace_back("moduli_e0_zoom.svg", box_plot_svg("|λ| of J_L at initialisation (own scale)", "|λ|",
                                                          cells_for(0, true), {0.0, nice_ceiling(e0_max)}));
  }

  const fs::path dir = make_run_dir();
  std::vector<fs::path> written;
  for (const auto& [name, svg] : files) {
    write_text(dir / name, svg);
    written.push_back(dir / name);
  }
  return written;
}

}  // namespace aespec::cli
