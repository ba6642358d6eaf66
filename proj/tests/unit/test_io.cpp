#include <doctest.h>

#include <cstdio>

#include "fixtures.hpp"
#include "frd/config.hpp"
#include "frd/io.hpp"
#include "frd/rng.hpp"

using namespace frd;
using frd::testing::desk;

TEST_CASE("hex floats round-trip bit-exactly") {
  CounterRng rng(1);
  for (int i = 0; i < 200; ++i) {
    double v = rng.gaussian(i, 0) * std::pow(10.0, static_cast<int>(rng.uniform(i, 1) * 40) - 20);
    if (i == 0) v = 0.0;
    if (i == 1) v = -0.0;
    CHECK(parse_hex_double(hex_double(v)) == v);
  }
}

TEST_CASE("generator documents round-trip exactly") {
  const MultiIndexSet ms = MultiIndexSet::gradients_plus(2);
  const Generator A = random_generator(ms, 2, 0.5, 2.0, 77);
  const std::string text = generator_to_json(A);
  const Generator back = generator_from_json(text);
  CHECK(back.m == A.m);
  CHECK(back.omega0 == A.omega0);
  CHECK(back.Omega0 == A.Omega0);
  CHECK(back.mset == A.mset);
  CHECK((back.blocks - A.blocks).norm() == 0.0);  // exact decimal round-trip
  // Serialization is deterministic.
  CHECK(generator_to_json(back) == text);
}

TEST_CASE("decomposition export round-trips bit-exactly") {
  const auto& d = desk();
  const TorusGeometry g(3, 2, 2, 1);
  BaseBuilder bld(g, d.lap, 0.0, 1);
  Decomposition dec = improved_decomposition(bld.build(), 2);
  const std::string text = decomposition_to_text(dec);
  const Decomposition back = decomposition_from_text(text);
  CHECK(back.kind == dec.kind);
  CHECK(back.n == dec.n);
  for (int k = 1; k <= g.N + 1; ++k) {
    CHECK((back.tail[k - 1] - dec.tail[k - 1]).norm() == 0.0);
    for (std::int64_t p = 0; p < g.volume; ++p)
      CHECK((back.spectral[k - 1].values[p] - dec.spectral[k - 1].values[p]).norm() == 0.0);
  }
  CHECK(decomposition_to_text(back) == text);
}

TEST_CASE("batch export carries full precision") {
  const auto& d = desk();
  const SampleBatch batch = sample(d.final3.spectral[0], 5, 2);
  const std::string text = batch_to_text(batch);
  CHECK(text.find("seed 5 count 2") != std::string::npos);
  // One line per site per sample plus headers.
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == 1 + 2 * (d.g3.volume + 1));
}

TEST_CASE("report writers") {
  BoundsReport rep;
  rep.add({"suiteA", "q1", 1, 0, 1.5, 2.0, 0.75, true});
  rep.add({"suiteA", "q2", 2, 1, 3.0, 2.0, 1.5, false});
  const std::string csv = report_to_csv(rep);
  CHECK(csv.find("suite,k,j,quantity,measured,bound,ratio,pass") == 0);
  CHECK(csv.find("suiteA,1,0,q1,1.5,2,0.75,1") != std::string::npos);
  CHECK(csv.find("suiteA,2,1,q2,3,2,1.5,0") != std::string::npos);
  CHECK(!rep.all_pass());
  CHECK(rep.fitted_max("suiteA") == 1.5);
  CHECK(rep.fitted_min("suiteA") == 0.75);
  const std::string js = report_to_json(rep);
  CHECK(js.find("\"suite\": \"suiteA\"") != std::string::npos);
}

TEST_CASE("run configuration: defaults, parsing, validation diagnostics") {
  const RunConfig cfg = RunConfig::from_json_text(R"({
    "geometry": {"L": 3, "N": 2, "d": 2, "m": 1},
    "omega0": 0.5, "Omega0": 2.0,
    "generator": {"type": "diagonal", "diag": [1.0, 0.6]},
    "decomposition": {"kind": "final", "n": 1, "ntilde": 3},
    "seed": 9, "sample_count": 500, "workers": 2
  })");
  CHECK(cfg.N == 2);
  CHECK(cfg.kind == "final");
  CHECK(cfg.make_ensemble().size() >= 3);
  // Lexicographic block order puts e_2 = (0,1) first, so its axis coefficient
  // leads the diagonal.
  const Generator A = cfg.main_generator();
  CHECK(A.blocks(0, 0) == doctest::Approx(0.6));
  CHECK(A.blocks(1, 1) == doctest::Approx(1.0));

  auto rejects = [](const char* text, const char* what) {
    try {
      RunConfig::from_json_text(text);
      FAIL_CHECK("expected rejection: ", what);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(what) != std::string::npos);
    }
  };
  rejects(R"({"geometry": {"L": 4}})", "geometry.L");
  rejects(R"({"geometry": {"d": 1}})", "geometry.d");
  rejects(R"({"decomposition": {"kind": "final", "n": 2, "ntilde": 2}})", "ntilde");
  rejects(R"({"decomposition": {"kind": "weird"}})", "kind");
  rejects(R"({"omega0": -1})", "omega0");
  rejects(R"({"generator": {"type": "diagonal"}})", "diag");
  rejects(R"({"workers": 0})", "workers");
}
