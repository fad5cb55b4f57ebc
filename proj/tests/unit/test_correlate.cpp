#include <doctest.h>

#include <cmath>
#include <limits>

#include "correlation_oracles.hpp"
#include "srfid/common/error.hpp"
#include "srfid/common/rng.hpp"
#include "srfid/correlate/benchmark.hpp"
#include "srfid/correlate/correlation.hpp"
#include "srfid/correlate/series.hpp"
#include "tempdir.hpp"

using namespace srfid;
using namespace srfid::correlate;
using V = std::vector<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

study::FidelityScore fs(const std::string& id, double score) { return study::FidelityScore{id, 12, score, true}; }

study::PairRecord pr(const std::string& id, study::Split split) {
  study::PairRecord p;
  p.pair_id = id;
  p.gt_path = p.sr_path = id;
  p.model_name = "m";
  p.split = split;
  return p;
}

}  // namespace

TEST_CASE("srcc: closed forms and the tie fixture") {
  CHECK(srcc(V{1, 2, 3}, V{10, 20, 30}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(srcc(V{1, 2, 3}, V{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(srcc(V{1, 2, 2, 3}, V{1, 2, 3, 4}) - 0.9487) <= 1e-4);
  CHECK(average_ranks(V{1, 2, 2, 3}) == V{1, 2.5, 2.5, 4});
  CHECK_THROWS_AS(srcc(V{1, 1, 1}, V{1, 2, 3}), DegenerateInputError);
  CHECK_THROWS_AS(srcc(V{1, 2}, V{1, 2}), ArgumentError);
  CHECK_THROWS_AS(srcc(V{1, 2, 3}, V{1, 2}), ArgumentError);
  CHECK_THROWS_AS(srcc(V{1, std::nan(""), 3}, V{1, 2, 3}), ArgumentError);
}

TEST_CASE("srcc: infinities rank above every finite value and tie with each other") {
  CHECK(average_ranks(V{kInf, 1, kInf, 5}) == V{3.5, 1, 3.5, 2});
  CHECK(srcc(V{1, 2, kInf}, V{0.1, 0.2, 0.9}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(srcc(V{1, 2, -kInf}, V{0.1, 0.2, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("plcc: closed forms, two-pass oracle, errors") {
  const V x = {0.3, 1.7, -2.0, 4.5, 0.0, 9.25, 3.3, -1.1, 2.2, 6.0};
  V y(x.size()), z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    y[k] = 2 * x[k] + 1;
    z[k] = -x[k];
  }
  CHECK(std::abs(plcc(x, y) - 1.0) <= 1e-12);
  CHECK(std::abs(plcc(x, z) + 1.0) <= 1e-12);
  const V w = {1.0, -0.5, 3.0, 2.5, 0.25, 4.0, -1.0, 0.0, 1.5, 2.0};
  CHECK(std::abs(plcc(x, w) - testing::pearson_oracle(x, w)) <= 1e-12);
  CHECK_THROWS_AS(plcc(V{1, 2, kInf}, V{1, 2, 3}), ArgumentError);
  CHECK_THROWS_AS(plcc(V{1, 2, 3}, V{5, 5, 5}), DegenerateInputError);
}

TEST_CASE("invariances: monotone transforms, affine maps, symmetry") {
  Rng rng(2024);
  V x(50), y(50);
  for (std::size_t k = 0; k < 50; ++k) {
    x[k] = rng.uniform(-3, 3);
    y[k] = x[k] + rng.normal() * 0.7;
  }
  const double base = srcc(x, y);
  V ex(50), cube(50), affine(50);
  for (std::size_t k = 0; k < 50; ++k) {
    ex[k] = std::exp(x[k]);
    cube[k] = y[k] * y[k] * y[k];
    affine[k] = 3.5 * y[k] - 7.0;
  }
  CHECK(std::abs(srcc(ex, y) - base) <= 1e-12);
  CHECK(std::abs(srcc(x, cube) - base) <= 1e-12);
  CHECK(std::abs(plcc(x, affine) - plcc(x, y)) <= 1e-9);
  CHECK(srcc(x, y) == srcc(y, x));
  CHECK(plcc(x, y) == plcc(y, x));
}

TEST_CASE("oracles: 100 random 20-point fixtures with ties") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    V x(20), y(20);
    for (int k = 0; k < 20; ++k) {
      x[k] = static_cast<double>(rng.below(8));  // forces ties
      y[k] = rng.uniform(0, 1);
    }
    CHECK(std::abs(srcc(x, y) - testing::spearman_oracle(x, y)) <= 1e-12);
    CHECK(std::abs(plcc(x, y) - testing::pearson_oracle(x, y)) <= 1e-12);
  }
}

TEST_CASE("import_external_scores: valid file, duplicate, missing header, bad line") {
  const auto s = parse_external_scores(
      "{\"scorer_name\":\"LPIPS\",\"orientation\":\"lower_is_better\"}\n{\"pair_id\":\"p1\",\"value\":0.25}\n");
  CHECK(s.scorer_name == "LPIPS");
  CHECK(s.orientation == Orientation::lower_is_better);
  CHECK(s.type == ScorerType::FR);
  CHECK(s.entries.size() == 1);
  CHECK(s.entries.at("p1") == 0.25);

  try {
    parse_external_scores(
        "{\"scorer_name\":\"X\",\"orientation\":\"higher_is_better\"}\n{\"pair_id\":\"dup\",\"value\":1}\n"
        "{\"pair_id\":\"dup\",\"value\":2}\n");
    FAIL("expected ConflictError");
  } catch (const ConflictError& e) {
    CHECK(std::string(e.what()).find("dup") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_external_scores("{\"pair_id\":\"p1\",\"value\":0.25}\n"), ParseError);
  CHECK_THROWS_AS(parse_external_scores(""), ParseError);
  try {
    parse_external_scores("{\"scorer_name\":\"X\",\"orientation\":\"lower_is_better\"}\n\n{\"pair_id\":\"a\",\"value\":1}\n{oops\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_external_scores("{\"scorer_name\":\"X\",\"orientation\":\"sideways\"}\n"), ParseError);
  const auto inf = parse_external_scores(
      "{\"scorer_name\":\"PSNR\",\"orientation\":\"higher_is_better\",\"type\":\"FR\"}\n"
      "{\"pair_id\":\"a\",\"value\":null,\"infinite\":true}\n");
  CHECK(inf.entries.at("a") == kInf);
  CHECK_THROWS_AS(import_external_scores("/nonexistent/file.jsonl"), IoError);
}

TEST_CASE("series file autodetection") {
  testing::TempDir tmp;
  write_file_atomic(tmp / "metrics.jsonl",
                    "{\"pair_id\":\"a\",\"metric\":\"psnr\",\"orientation\":\"higher_is_better\",\"value\":null,\"infinite\":true}\n"
                    "{\"pair_id\":\"a\",\"metric\":\"ssim\",\"orientation\":\"higher_is_better\",\"value\":1.0,\"infinite\":false}\n"
                    "{\"pair_id\":\"b\",\"metric\":\"psnr\",\"error\":\"io: missing\"}\n");
  auto m = load_series_file(tmp / "metrics.jsonl");
  REQUIRE(m.size() == 2);
  CHECK(m[0].scorer_name == "psnr");
  CHECK(m[0].entries.at("a") == kInf);
  CHECK(m[0].entries.count("b") == 0);
  CHECK(m[1].orientation == Orientation::higher_is_better);

  write_file_atomic(tmp / "hlf.jsonl",
                    "{\"pair_id\":\"a\",\"cosine\":0.5,\"change_score\":0.25,\"model_name\":\"gap3\"}\n");
  auto h = load_series_file(tmp / "hlf.jsonl");
  REQUIRE(h.size() == 1);
  CHECK(h[0].type == ScorerType::HLF);
  CHECK(h[0].orientation == Orientation::lower_is_better);

  write_file_atomic(tmp / "weird.jsonl", "{\"foo\":1}\n");
  CHECK_THROWS_AS(load_series_file(tmp / "weird.jsonl"), ParseError);
}

TEST_CASE("benchmark: self-correlation, negation, split filter, per-row errors") {
  std::vector<study::FidelityScore> scores;
  std::vector<study::PairRecord> pairs;
  ScoreSeries same{"same", Orientation::lower_is_better, ScorerType::HLF, {}};
  ScoreSeries quality{"quality", Orientation::higher_is_better, ScorerType::FR, {}};
  ScoreSeries sparse{"sparse", Orientation::lower_is_better, ScorerType::NR, {}};
  ScoreSeries flat{"flat", Orientation::lower_is_better, ScorerType::NR, {}};
  ScoreSeries psnr{"psnr", Orientation::higher_is_better, ScorerType::FR, {}};
  for (int k = 0; k < 20; ++k) {
    const std::string id = "p" + std::to_string(k);
    const double f = (k * 7 % 20) / 19.0;
    scores.push_back(fs(id, f));
    pairs.push_back(pr(id, k % 4 == 0 ? study::Split::test : study::Split::train));
    same.add(id, f);
    quality.add(id, 1.0 - f);
    flat.add(id, 0.5);
    psnr.add(id, f == 0.0 ? kInf : 40.0 - 30.0 * f);
    if (k < 2) sparse.add(id, f);
  }
  scores.push_back(study::FidelityScore{"provisional", 3, 0.9, false});
  same.add("provisional", 0.0);

  const auto rep = benchmark(scores, pairs, {same, quality, sparse, flat, psnr}, DatasetSplit::all, 3);
  REQUIRE(rep.rows.size() == 5);
  CHECK(*rep.rows[0].srcc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*rep.rows[0].plcc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.rows[0].n == 20);
  CHECK(*rep.rows[1].srcc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*rep.rows[1].plcc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(rep.rows[2].srcc.has_value());
  CHECK(rep.rows[2].error.find("insufficient") != std::string::npos);
  CHECK_FALSE(rep.rows[3].srcc.has_value());
  CHECK_FALSE(rep.rows[3].error.empty());
  CHECK(rep.rows[4].n == 20);
  CHECK(rep.rows[4].n_plcc == 19);
  CHECK(*rep.rows[4].srcc == doctest::Approx(1.0).epsilon(1e-12));

  const auto test = benchmark(scores, pairs, {same}, DatasetSplit::test);
  CHECK(test.rows[0].n == 5);
  CHECK(to_json(test)["dataset_split"] == "test");

  const auto again = benchmark(scores, pairs, {same, quality, sparse, flat, psnr}, DatasetSplit::all, 1);
  Json a = to_json(rep), b = to_json(again);
  a.erase("generated_at");
  b.erase("generated_at");
  CHECK(a == b);

  const std::string table = format_table(rep);
  CHECK(table.rfind("Metric", 0) == 0);
  CHECK(table.find("quality") != std::string::npos);
  CHECK(table.find("1.0000") != std::string::npos);
  CHECK(table.find("negated") != std::string::npos);
  CHECK(to_json(rep)["sign_convention"].is_string());
}
