#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpsabb/io.hpp"
#include "gpsabb/pipeline.hpp"
#include "helpers.hpp"

using namespace gpsabb;
namespace fs = std::filesystem;

namespace {

std::string read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Dataset pipeline_dataset(std::uint64_t seed) {
  return testutil::shifted_dataset({120, 160, 200}, 3, 0.3, {0.5, 0.5, 0.5}, seed);
}

}  // namespace

TEST_CASE("abb run produces one record per contrast with CI arithmetic") {
  RunConfig cfg;
  cfg.Q = 2;
  cfg.M = 10;
  cfg.seed = 5;
  EstimateReport report = run_estimate(pipeline_dataset(1), cfg);
  REQUIRE(report.records.size() == 3);  // pairs (1,2), (1,3), (2,3)
  for (const auto& rec : report.records) {
    CHECK(rec.method == "abb");
    CHECK(rec.ci_low == doctest::Approx(rec.point - 1.96 * rec.se).epsilon(1e-12));
    CHECK(rec.ci_high == doctest::Approx(rec.point + 1.96 * rec.se).epsilon(1e-12));
    CHECK(rec.se >= 0.0);
  }
  CHECK(report.metadata.count("n_excluded") == 1);
  CHECK(report.metadata.count("Q_eff") == 1);
  CHECK(report.metadata.at("method") == "abb");
}

TEST_CASE("reference 0 selects the largest treatment group") {
  RunConfig cfg;
  cfg.Q = 1;
  cfg.M = 5;
  cfg.seed = 2;
  EstimateReport report = run_estimate(pipeline_dataset(2), cfg);
  CHECK(report.metadata.at("reference") == "3");  // group 3 has 200 units
}

TEST_CASE("null outcome distribution keeps contrasts near zero") {
  // Outcomes are independent coin flips in every group: the ATT is zero by
  // construction and the pooled estimate should sit within 3 SEs of it.
  RunConfig cfg;
  cfg.Q = 1;
  cfg.M = 25;
  cfg.seed = 40;
  EstimateReport report = run_estimate(pipeline_dataset(7), cfg);
  for (const auto& rec : report.records)
    CHECK(std::abs(rec.point) < 3.0 * rec.se + 1e-12);
}

TEST_CASE("identical seeded runs write byte-identical reports") {
  RunConfig cfg;
  cfg.Q = 3;
  cfg.M = 10;
  cfg.seed = 77;
  Dataset d = pipeline_dataset(9);
  EstimateReport a = run_estimate(d, cfg);
  EstimateReport b = run_estimate(d, cfg);

  const fs::path pa = fs::temp_directory_path() / "gpsabb_pipe_a.json";
  const fs::path pb = fs::temp_directory_path() / "gpsabb_pipe_b.json";
  write_report_json(a, pa.string());
  write_report_json(b, pb.string());
  CHECK(read_bytes(pa) == read_bytes(pb));
  fs::remove(pa);
  fs::remove(pb);
}

TEST_CASE("matching produces records and a matched balance context") {
  RunConfig cfg;
  cfg.method = Method::matching;
  cfg.seed = 3;
  EstimateReport report = run_estimate(pipeline_dataset(3), cfg);
  REQUIRE(report.records.size() == 3);
  CHECK(report.records[0].method == "matching");
  CHECK(report.balance_after.context == BalanceContext::matched);
}

TEST_CASE("ipw reports raw balance on both sides") {
  RunConfig cfg;
  cfg.method = Method::ipw;
  cfg.seed = 4;
  EstimateReport report = run_estimate(pipeline_dataset(4), cfg);
  REQUIRE(report.records.size() == 3);
  CHECK(report.records[0].method == "ipw");
  CHECK(report.balance_after.maxmax2sb == report.balance_before.maxmax2sb);
  CHECK((report.balance_after.sb.array() == report.balance_before.sb.array()).all());
}

TEST_CASE("rubin correction never shrinks the pooled SE") {
  Dataset d = pipeline_dataset(11);
  RunConfig plain;
  plain.Q = 2;
  plain.M = 10;
  plain.seed = 6;
  RunConfig corrected = plain;
  corrected.rubin_correction = true;
  EstimateReport a = run_estimate(d, plain);
  EstimateReport b = run_estimate(d, corrected);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(b.records[i].point == a.records[i].point);
    CHECK(b.records[i].se >= a.records[i].se);
  }
}

TEST_CASE("multiple estimands multiply the record count") {
  RunConfig cfg;
  cfg.Q = 1;
  cfg.M = 5;
  cfg.seed = 8;
  cfg.estimands = {Estimand::risk_difference, Estimand::log_odds_ratio};
  EstimateReport report = run_estimate(pipeline_dataset(5), cfg);
  CHECK(report.records.size() == 6);
}

TEST_CASE("invalid configuration is rejected up front") {
  Dataset d = pipeline_dataset(6);
  RunConfig cfg;
  cfg.M = 1;
  CHECK_THROWS_AS(run_estimate(d, cfg), Error);
  RunConfig bad_ref;
  bad_ref.reference = 9;
  CHECK_THROWS_AS(run_estimate(d, bad_ref), Error);
}
