#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "aespec/cli.hpp"
#include "oracles.hpp"

using namespace aespec;
using namespace aespec::cli;
using oracle::cplx;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

spectra::SpectralSummary fixture(std::size_t d, std::size_t epoch, double scale) {
  std::vector<linalg::Spectrum> sp{linalg::Spectrum{{cplx(scale, 0), cplx(0, scale), cplx(2 * scale, 0)}}};
  return spectra::summarize(sp, epoch, d);
}

}  // namespace

TEST_CASE("index lists") {
  CHECK(parse_index_list("2..5") == std::vector<std::size_t>{2, 3, 4, 5});
  CHECK(parse_index_list("0,1,4,10") == std::vector<std::size_t>{0, 1, 4, 10});
  CHECK(parse_index_list("2..3,8") == std::vector<std::size_t>{2, 3, 8});
  CHECK_THROWS_AS(parse_index_list("a"), UsageError);
  CHECK_THROWS_AS(parse_index_list("5..2"), UsageError);
  CHECK_THROWS_AS(parse_index_list(""), UsageError);
  CHECK_THROWS_AS(parse_index_list("-1"), UsageError);
}

TEST_CASE("run ids and run directories") {
  RunManifest a;
  a.command = Command::Train;
  a.seeds = {0};
  a.latent_dims = {2, 4};
  RunManifest b = a;
  b.output_dir = "/elsewhere";
  b.workers = 7;
  CHECK(a.run_id() == b.run_id());
  CHECK(a.run_id().rfind("train-", 0) == 0);
  b.seeds = {1};
  CHECK(a.run_id() != b.run_id());

  TempDir tmp("aespec_test_rundir");
  a.output_dir = tmp.path;
  const auto dir = create_run_dir(a);
  CHECK(fs::is_regular_file(dir / "manifest.json"));
  CHECK_THROWS_AS(create_run_dir(a), UsageError);
}

TEST_CASE("parallel_for visits every index once and propagates failures") {
  for (std::size_t workers : {1u, 3u, 16u}) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(parallel_for(50, 4, [](std::size_t i) {
                    if (i == 17) throw SuiteFailure("boom");
                  }),
                  SuiteFailure);
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(UsageError("x")) == 1);
  CHECK(exit_code_for(data::MissingDataError("x")) == 2);
  CHECK(exit_code_for(data::FormatError("x")) == 2);
  CHECK(exit_code_for(ae::FormatError("x")) == 2);
  CHECK(exit_code_for(SuiteFailure("x")) == 3);
  CHECK(exit_code_for(ae::NumericalError("x")) == 3);
  CHECK(exit_code_for(linalg::ConvergenceError(5, 200)) == 3);
}

TEST_CASE("summary writers") {
  const std::vector<linalg::Spectrum> ones{linalg::Spectrum{{cplx(1, 0), cplx(1, 0)}}};
  const auto s = spectra::summarize(ones, 0, 2);
  CHECK(summary_csv_header() ==
        "run_id,latent_dim,epoch,n_points,n_eigs,mod_min,mod_q25,mod_med,mod_q75,mod_p95,mod_max,"
        "arg_min,arg_q25,arg_med,arg_q75,arg_p95,arg_max,n_zero_eigs");
  CHECK(summary_csv_row("r", s) == "r,2,0,1,2,1,1,1,1,1,1,0,0,0,0,0,0,0");

  const std::vector<spectra::SpectralSummary> rows{fixture(2, 0, 0.5), fixture(3, 1, 0.25)};
  const auto back = parse_summary_json(json::parse(summary_json("r", rows).dump()));
  REQUIRE(back.size() == 2);
  CHECK(summary_csv(("r"), back) == summary_csv("r", rows));
  CHECK(back[1].argument.outliers == rows[1].argument.outliers);

  json wrong = summary_json("r", rows);
  wrong["schema_version"] = 99;
  CHECK_THROWS_AS(parse_summary_json(wrong), data::FormatError);

  TempDir tmp("aespec_test_append");
  const auto csv = tmp.path / "all.csv";
  append_summary_csv(csv, "r1", rows);
  append_summary_csv(csv, "r2", rows);
  CHECK(count_lines(slurp(csv)) == 5);
  write_text(tmp.path / "bad.csv", "run_id,latent_dim\n");
  CHECK_THROWS_AS(append_summary_csv(tmp.path / "bad.csv", "r", rows), data::FormatError);
}

TEST_CASE("prediction table") {
  const auto rows = prediction_table();
  REQUIRE(rows.size() == 19);
  CHECK(rows.front().n1 == 2);
  CHECK(rows.back().n1 == 20);
  for (const auto& r : rows) {
    CHECK(r.max_norm == doctest::Approx(1.0 / 81.0));
    CHECK(r.max_sq == doctest::Approx(1.0 / 6561.0));
    CHECK(r.median_norm == doctest::Approx(std::sqrt(r.median_sq)));
  }
  CHECK(count_lines(prediction_csv(rows)) == 20);
}

TEST_CASE("rmt-verify manifest contract") {
  const auto cases = default_rmt_cases();
  std::set<std::pair<std::string, std::size_t>> got;
  for (const auto& c : cases) got.insert({c.law, c.n});
  CHECK(got == std::set<std::pair<std::string, std::size_t>>{{"semicircle", 128}, {"semicircle", 256},
                                                             {"semicircle", 512}, {"circular", 512},
                                                             {"product2", 256},   {"product3", 256},
                                                             {"chain", 8}});

  const auto report = run_rmt_suite({{"circular", 256, 10}}, 4);
  CHECK(report.rows.size() == 10);
  CHECK(count_lines(report.rows_csv()) == 11);
  for (const auto& r : report.rows) CHECK(r.radius_estimate.value() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(0.05));
  CHECK(report.circular_scatter.size() == 256);
  CHECK(report.passed());
  CHECK(run_rmt_suite({{"circular", 256, 10}}, 1).rows_csv() == report.rows_csv());
  CHECK_THROWS_AS(run_rmt_suite({{"hyperbolic", 8, 1}}, 1), UsageError);
}

TEST_CASE("train writes one file per checkpoint, reproducibly") {
  TempDir tmp("aespec_test_train");
  const auto ds = data::synthetic_dataset(200, 3);
  TrainOptions opts;
  opts.dims = {4};
  opts.config.epochs = 0;
  fs::create_directories(tmp.path / "a");
  run_train(ds, opts, tmp.path / "a");
  CHECK(find_checkpoints(tmp.path / "a").size() == 1);
  CHECK(fs::exists(tmp.path / "a" / "ae_d4_e0.ckpt"));

  opts.dims = {2, 3};
  opts.config.epochs = 2;
  opts.config.checkpoint_epochs = {1, 2};
  for (const char* sub : {"b", "c"}) {
    fs::create_directories(tmp.path / sub);
    run_train(ds, opts, tmp.path / sub);
  }
  const auto found = find_checkpoints(tmp.path / "b");
  REQUIRE(found.size() == 6);
  CHECK(found[0].latent_dim == 2);
  CHECK(found[5].epoch == 2);
  for (const auto& c : found) CHECK(slurp(c.path) == slurp(tmp.path / "c" / c.path.filename()));
  CHECK(slurp(tmp.path / "b" / "losses.csv") == slurp(tmp.path / "c" / "losses.csv"));
}

TEST_CASE("analysis sampling and worker independence") {
  const auto idx = sample_indices(1000, 300, 0);
  CHECK(idx.size() == 300);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 300);
  CHECK(idx == sample_indices(1000, 300, 0));
  CHECK(idx != sample_indices(1000, 300, 1));
  CHECK(sample_indices(10, 50, 0).size() == 10);

  TempDir tmp("aespec_test_analyze");
  const auto ds = data::synthetic_dataset(300, 8);
  TrainOptions t;
  t.dims = {2, 5};
  t.config.epochs = 1;
  t.config.checkpoint_epochs = {1};
  run_train(ds, t, tmp.path);

  AnalyzeOptions a;
  a.checkpoint_dir = tmp.path;
  a.points = 40;
  a.dump_eigenvalues = true;
  fs::create_directories(tmp.path / "w1");
  fs::create_directories(tmp.path / "w4");
  a.workers = 1;
  const auto one = run_analyze(ds, a, "run", tmp.path / "w1");
  a.workers = 4;
  const auto four = run_analyze(ds, a, "run", tmp.path / "w4");
  REQUIRE(one.size() == 4);
  for (const char* f : {"summary.csv", "summary.json", "eigs_d5_e1.csv"})
    CHECK(slurp(tmp.path / "w1" / f) == slurp(tmp.path / "w4" / f));
  CHECK(count_lines(slurp(tmp.path / "w1" / "summary.csv")) == 5);

  a.epochs = {7};
  CHECK_THROWS_AS(run_analyze(ds, a, "run", tmp.path / "w4"), data::MissingDataError);

  // A checkpoint renamed to the wrong cell is a versioned format error.
  fs::copy_file(tmp.path / "ae_d2_e1.ckpt", tmp.path / "ae_d3_e1.ckpt");
  a.epochs = {};
  a.dims = {3};
  try {
    run_analyze(ds, a, "run", tmp.path / "w4");
    FAIL("expected a format error");
  } catch (const ae::FormatError& e) {
    CHECK(std::string(e.what()).find("format v1") != std::string::npos);
  }
}

TEST_CASE("input and latent Jacobian spectra agree at a fixed point") {
  const auto p = ae::init(3, 12);
  auto x = data::synthetic_dataset(1, 2).points[0];
  for (int it = 0; it < 10000; ++it) x = ae::forward(p, x).reconstruction();
  const std::vector<std::vector<double>> pts{x};
  const auto lat = point_spectra(p, pts, jac::Which::Latent, 1)[0].values;
  auto inp = point_spectra(p, pts, jac::Which::Input, 1)[0].values;
  std::sort(inp.begin(), inp.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  inp.resize(3);
  CHECK(oracle::multiset_distance(lat, inp) <= 1e-6);
}

TEST_CASE("report file contract") {
  TempDir tmp("aespec_test_report");
  std::vector<spectra::SpectralSummary> rows;
  const std::vector<std::size_t> epochs{0, 1, 4, 10, 50, 300};
  for (std::size_t e : epochs)
    for (std::size_t d : {2u, 3u, 4u}) rows.push_back(fixture(d, e, 0.001 * (1.0 + e) / d));
  write_text(tmp.path / "summary.json", summary_json("r", rows).dump());

  int made = 0;
  auto make = [&] {
    ++made;
    fs::create_directories(tmp.path / "out");
    return tmp.path / "out";
  };
  const auto files = run_report({tmp.path, {}, {}}, make);
  CHECK(files.size() == 13);
  CHECK(made == 1);
  const std::string args = slurp(tmp.path / "out" / "arguments_e4.svg");
  CHECK(args.find(">3.14<") != std::string::npos);
  CHECK(args.find("<svg") == 0);
  // moduli share one scale across epochs; the zoom panel has its own
  const std::string m0 = slurp(tmp.path / "out" / "moduli_e0.svg");
  const std::string m300 = slurp(tmp.path / "out" / "moduli_e300.svg");
  const std::string zoom = slurp(tmp.path / "out" / "moduli_e0_zoom.svg");
  CHECK(m0.find(">0.2<") != std::string::npos);
  CHECK(m300.find(">0.2<") != std::string::npos);
  CHECK(zoom.find(">0.2<") == std::string::npos);

  made = 0;
  try {
    run_report({tmp.path, {2, 3, 4, 5}, {}}, make);
    FAIL("expected missing cells");
  } catch (const data::MissingDataError& e) {
    CHECK(std::string(e.what()).find("(d=5, epoch 300)") != std::string::npos);
  }
  TempDir empty("aespec_test_report_empty");
  CHECK_THROWS_AS(run_report({empty.path, {}, {}}, make), data::MissingDataError);
  write_text(empty.path / "summary.json", summary_json("r", {}).dump());
  CHECK_THROWS_AS(run_report({empty.path, {}, {}}, make), data::MissingDataError);
  CHECK(made == 0);
}
