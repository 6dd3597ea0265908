#include "doctest.h"

#include "hypercurv/errors.hpp"
#include "hypercurv/rigidity.hpp"

#include <cmath>
#include <random>

using namespace hypercurv;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

const std::vector<double> kLevels{1.0, 2.0, 3.0, 4.0};

}  // namespace

TEST_CASE("flat direction on the cone") {
  const FlatDirectionReport r = flat_direction_check(HeightField::equidistant_cone(1.0, 3).jet(vec({1, 0, 0})), 3);
  CHECK(r.null_space_dim == 1);
  CHECK(r.principal_alignment <= 1e-8);
  REQUIRE(r.kappa0);
  REQUIRE(r.kappa0_expected);
  CHECK(*r.kappa0 == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(*r.kappa0_expected == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r.all_kappas_positive);
}

TEST_CASE("flat directions on the horosphere and the sphere cap") {
  const FlatDirectionReport h = flat_direction_check(HeightField::horosphere(1.0, 3).jet(vec({0.2, 0.1, 0})), 3);
  CHECK(h.null_space_dim == 3);
  REQUIRE(h.kappa0);
  CHECK(*h.kappa0 == doctest::Approx(1.0));
  REQUIRE(h.kappa0_expected);
  CHECK(*h.kappa0_expected == doctest::Approx(1.0));  // roots (3 -+ 1)/2
  CHECK(h.root_deviation <= 1e-12);

  const FlatDirectionReport s = flat_direction_check(HeightField::sphere_cap(2.0, 1.0, CapSide::Lower, 3).jet(Vec::Zero(3)), 3);
  CHECK(s.empty());
  CHECK_FALSE(s.kappa0);
}

TEST_CASE("flat direction preconditions") {
  CHECK_THROWS_AS(flat_direction_check(HeightField::horosphere(1.0, 2).jet(Vec::Zero(2)), 2), ParameterError);
  CHECK_THROWS_AS(flat_direction_check(HeightField::tilted_plane(1.0, 3).jet(vec({1, 0, 0})), 3), PreconditionError);
}

TEST_CASE("ricci-null directions carry the smaller root") {
  std::mt19937_64 rng(1);
  int seen = 0;
  for (double s : {0.5, 1.0, 2.0, 5.0})
    for (int n : {3, 4}) {
      const HeightField cone = HeightField::equidistant_cone(s, n);
      for (const Vec& x : sample_points(cone, 30, rng)) {
        const FlatDirectionReport r = flat_direction_check(cone.jet(x), n);
        REQUIRE(r.null_space_dim == 1);
        ++seen;
        CHECK(r.root_deviation <= 1e-8);
        CHECK(r.principal_alignment <= 1e-6);
        CHECK(r.all_kappas_positive);
        CHECK(*r.kappa0 == doctest::Approx(1 / std::sqrt(1 + s * s)).epsilon(1e-10));
      }
    }
  CHECK(seen == 240);
}

TEST_CASE("commutation residual") {
  const PointAnalysis h = analyze_jet(HeightField::horosphere(1.0, 3).jet(Vec::Zero(3)));
  CHECK(commutation_residual(h.ricci, h.forms.g, h.spectrum.shape) == 0.0);
  const PointAnalysis p = analyze_jet(HeightField::tilted_plane(1.0, 3).jet(vec({1.3, 0.2, -0.4})));
  CHECK(commutation_residual(p.ricci, p.forms.g, p.spectrum.shape) <= 1e-12);

  // Jets of a perturbed sphere cap, interpolated from a grid.
  const HeightField cap = HeightField::sphere_cap(2.0, 1.0, CapSide::Lower, 3);
  const GridSpec spec = GridSpec::parse("-0.5:0.5:41,-0.5:0.5:41,-0.5:0.5:41");
  std::vector<double> v(spec.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec x = spec.position(i);
    v[i] = cap.value(x) + 0.05 * std::sin(3 * x[0]) * std::cos(2 * x[1] + x[2]);
  }
  const HeightField sampled = HeightField::sampled(GridFunction::with_box_boundary(spec, v), 4);
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (const Vec& x : sample_points(sampled, 200, rng)) {
    const PointAnalysis a = analyze_jet(sampled.jet(x));
    worst = std::max(worst, commutation_residual(a.ricci, a.forms.g, a.spectrum.shape));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("split spectrum") {
  const SplitSpectrum s = split_spectrum(vec({0.5, 2.0, 2.0}), 3);
  CHECK_FALSE(s.umbilic);
  CHECK(s.kappa0 == 0.5);
  CHECK(s.kappa_transverse == 2.0);
  CHECK(split_spectrum(Vec::Constant(4, 1.0), 4).umbilic);
  CHECK_THROWS_AS(split_spectrum(vec({1.0, 2.0, 3.0}), 3), StructureError);
  // The single eigenvalue may be the larger one.
  const SplitSpectrum up = split_spectrum(vec({1.0, 1.0, 3.0}), 3);
  CHECK(up.kappa0 == 3.0);
  CHECK(up.kappa_transverse == 1.0);
  CHECK_THROWS_AS(split_spectrum(vec({1.0, 1.0, 3.0, 3.0}), 4), StructureError);
}

TEST_CASE("constancy scan on the cone and the horosphere") {
  std::mt19937_64 rng(3);
  const HeightField cone1 = HeightField::equidistant_cone(1.0, 3);
  const ConstancyResult c1 = constancy_scan(cone1, sample_points(cone1, 100, rng), 3);
  CHECK(c1.structure == SpectrumStructure::Split);
  CHECK(c1.var_kappa0 <= 1e-20);
  CHECK(c1.var_kappa_transverse <= 1e-20);
  CHECK(c1.product_defect <= 1e-10);

  const HeightField cone2 = HeightField::equidistant_cone(2.0, 3);
  const ConstancyResult c2 = constancy_scan(cone2, sample_points(cone2, 100, rng), 3);
  CHECK(c2.kappa0 == doctest::Approx(1 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(c2.kappa_transverse == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(c2.var_kappa0 <= 1e-20);

  const HeightField horo = HeightField::horosphere(1.0, 3);
  const ConstancyResult h = constancy_scan(horo, sample_points(horo, 50, rng), 3);
  CHECK(h.structure == SpectrumStructure::Umbilic);
  CHECK(h.kappa0 == doctest::Approx(1.0));

  // A graph with a generic spectrum does not split.
  const GridSpec spec = GridSpec::parse("-0.5:0.5:21,-0.5:0.5:21,-0.5:0.5:21");
  std::vector<double> v(spec.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec x = spec.position(i);
    v[i] = 2.0 + x[0] * x[0] + 0.3 * x[1] * x[1] + 0.1 * x[2];
  }
  const HeightField generic = HeightField::sampled(GridFunction::with_box_boundary(spec, v), 4);
  CHECK(constancy_scan(generic, sample_points(generic, 10, rng), 3).structure == SpectrumStructure::Irregular);
  CHECK_THROWS_AS(constancy_scan(HeightField::horosphere(1.0, 2), {Vec::Zero(2)}, 2), ParameterError);
}

TEST_CASE("global verdicts") {
  const ClassifyOutcome cone = classify_surface(HeightField::equidistant_cone(1.0, 3), kLevels, 100, 7);
  CHECK(cone.verdict.verdict == Verdict::EquidistantTube);
  CHECK(cone.verdict.boundary_points == 2);
  REQUIRE(cone.verdict.kappa0);
  CHECK(*cone.verdict.kappa0 == doctest::Approx(1 / std::sqrt(2.0)));

  const ClassifyOutcome horo = classify_surface(HeightField::horosphere(1.0, 3), kLevels, 100, 7);
  CHECK(horo.verdict.verdict == Verdict::Horosphere);
  CHECK(horo.verdict.boundary_points == 1);

  const ClassifyOutcome cap = classify_surface(HeightField::sphere_cap(2.0, 1.0, CapSide::Lower, 3), kLevels, 100, 7);
  CHECK(cap.verdict.verdict == Verdict::Inconclusive);
  CHECK(cap.verdict.boundary_points == 0);

  const ClassifyOutcome plane = classify_surface(HeightField::tilted_plane(1.0, 3), kLevels, 50, 7);
  CHECK(plane.verdict.boundary_points <= 2);
  CHECK(plane.verdict.verdict != Verdict::EquidistantTube);
  CHECK(plane.verdict.verdict != Verdict::Horosphere);
}

TEST_CASE("global verdict rules on synthetic inputs") {
  ConstancyResult split;
  split.structure = SpectrumStructure::Split;
  split.samples = 10;
  split.kappa0 = 0.5;
  split.kappa_transverse = 2.0;
  split.min_ricci_eig = 0.0;
  RecessionReport rec;
  rec.boundary_points = 3;
  CHECK_THROWS_AS(classify_global(split, rec, 3), ContradictionError);

  // Negative Ricci: three boundary points are not a contradiction.
  ConstancyResult negative = split;
  negative.min_ricci_eig = -0.5;
  CHECK(classify_global(negative, rec, 3).verdict == Verdict::Inconclusive);

  rec.boundary_points = 1;
  CHECK(classify_global(split, rec, 3).verdict == Verdict::SingleEndCandidate);

  rec.boundary_points = 2;
  split.var_kappa0 = 1e-6;  // not constant
  CHECK(classify_global(split, rec, 3).verdict == Verdict::Inconclusive);
  split.var_kappa0 = 0.0;
  split.product_defect = 1e-3;  // kappa0 * kappa_t != 1
  CHECK(classify_global(split, rec, 3).verdict == Verdict::Inconclusive);
  split.product_defect = 0.0;
  CHECK(classify_global(split, rec, 3).verdict == Verdict::EquidistantTube);

  const nlohmann::json j = to_json(classify_global(split, rec, 3));
  CHECK(j["verdict"] == "EquidistantTube");
  CHECK(j["boundary_points"] == 2);
}

TEST_CASE("verdicts are deterministic") {
  const HeightField cone = HeightField::equidistant_cone(2.0, 3);
  const auto a = to_json(classify_surface(cone, kLevels, 60, 11).verdict);
  const auto b = to_json(classify_surface(cone, kLevels, 60, 11).verdict);
  CHECK(a.dump() == b.dump());
}
