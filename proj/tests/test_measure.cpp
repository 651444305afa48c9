#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stieltjes/measure.hpp"

using namespace stieltjes;

namespace {

// composite trapezoid oracle
double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n, s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(MeasureEval, DiracIsRightContinuous) {
  Measure d = Measure::dirac(0.5);
  EXPECT_EQ(d.eval(0.25), 0.0);
  EXPECT_EQ(d.eval(0.5), 1.0);
  EXPECT_EQ(d.eval_left(0.5), 0.0);
  EXPECT_NEAR(Measure::lebesgue().eval(0.7), 0.7, 1e-15);
}

TEST(MeasureEval, NormalizedAtZeroWithAtomThere) {
  Measure d = Measure::dirac(0.0, 2.0);
  EXPECT_EQ(d.eval(0.0), 0.0);
  EXPECT_EQ(d.eval(1e-12), 2.0);
}

TEST(MeasureEval, RightContinuityAtSamplePoints) {
  std::mt19937_64 rng(7);
  Measure m = random_measure(rng, {3, 2, 2, 2.0, true});
  for (double x : {0.1, 0.33, 0.5, 0.77}) EXPECT_NEAR(m.eval(x + 1e-12), m.eval(x), 1e-9);
}

TEST(MeasureEval, RejectsOutsideUnitInterval) {
  EXPECT_THROW(Measure::lebesgue().eval(1.5), DomainError);
  EXPECT_THROW(Measure::lebesgue().eval(-0.1), DomainError);
}

TEST(MeasureConstruction, RejectsDuplicateAtomsAndOverlap) {
  EXPECT_THROW(Measure({}, {{0.3, 1.0}, {0.3, 2.0}}), DomainError);
  EXPECT_THROW(Measure({{0.0, 0.6, {1.0}}, {0.5, 1.0, {1.0}}}, {}), DomainError);
  EXPECT_THROW(Measure({}, {{0.3, 0.0}}), DomainError);
  Measure merged = Measure::dirac(0.3, 1.0) + Measure::dirac(0.3, 2.0);
  ASSERT_EQ(merged.atoms().size(), 1u);
  EXPECT_EQ(merged.atoms()[0].w, 3.0);
}

TEST(TotalVariation, Examples) {
  EXPECT_DOUBLE_EQ(total_variation(Measure::dirac(0.42)), 1.0);
  Measure lin = Measure::density({-1.0, 2.0});
  EXPECT_NEAR(total_variation(lin), 0.5, 1e-12);
  double oracle = trapezoid([](double t) { return std::abs(2.0 * t - 1.0); }, 0.0, 1.0, 200000);
  EXPECT_NEAR(total_variation(lin), oracle, 1e-8);
}

TEST(TotalVariation, OscillationSequence) {
  EXPECT_NEAR(total_variation(oscillation_sequence(1)), 4.0, 1e-4);
  EXPECT_NEAR(total_variation(oscillation_sequence(2)), 8.0, 1e-3);
  EXPECT_LT(std::abs(total_variation(oscillation_sequence(3)) / 12.0 - 1.0), 1e-6);
  EXPECT_NEAR(oscillation_sequence(2).sup_norm(), 0.5, 1e-4);
  EXPECT_THROW(oscillation_sequence(1, 16), DomainError);
}

TEST(TotalVariation, IntervalKinds) {
  Measure m = Measure::dirac(0.0, 2.0) + Measure::lebesgue();
  EXPECT_NEAR(total_variation(m, 0.0, 1.0, Interval::Closed), 3.0, 1e-14);
  EXPECT_NEAR(total_variation(m, 0.0, 1.0, Interval::HalfOpen), 1.0, 1e-14);
  EXPECT_NEAR(total_variation(m, 0.25, 0.5), 0.25, 1e-14);
}

TEST(TvFunction, Examples) {
  Measure v = tv_function(Measure::dirac(0.5, -2.0));
  ASSERT_EQ(v.atoms().size(), 1u);
  EXPECT_EQ(v.atoms()[0].w, 2.0);
  EXPECT_TRUE(tv_function(Measure::zero()).is_zero());
  Measure lin = tv_function(Measure::density({-1.0, 2.0}));
  ASSERT_EQ(lin.pieces().size(), 2u);
  EXPECT_NEAR(lin.pieces()[0].hi, 0.5, 1e-14);
  for (double x : {0.1, 0.3, 0.6, 0.9}) EXPECT_NEAR(lin.density_at(x), std::abs(2.0 * x - 1.0), 1e-13);
}

TEST(TvFunction, MonotoneAndMatchesHalfOpenVariation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Measure m = random_measure(rng, {3, 2, 3, 1.5, true});
    Measure v = tv_function(m);
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
      double val = v.eval(i / 200.0);
      EXPECT_GE(val, prev - 1e-13);
      prev = val;
    }
    EXPECT_NEAR(v.eval(1.0), total_variation(m, 0.0, 1.0, Interval::HalfOpen), 1e-12);
  }
}

TEST(LsIntegral, Examples) {
  auto id = [](double x) { return std::complex<double>(x); };
  EXPECT_NEAR(std::abs(ls_integral(id, Measure::dirac(0.3)) - 0.3), 0.0, 1e-15);
  EXPECT_NEAR(ls_integral([](double) { return std::complex<double>(1.0); }, Measure::lebesgue()).real(), 1.0, 1e-14);
  auto val = ls_integral(id, Measure::density({0.0, 2.0}));
  EXPECT_NEAR(val.real(), 2.0 / 3.0, 1e-13);
  EXPECT_NEAR(val.real(), simpson([](double t) { return 2.0 * t * t; }, 0.0, 1.0, 1000), 1e-12);
}

TEST(LsIntegral, AtomAtZeroOnlyInClosedIntervals) {
  Measure d = Measure::dirac(0.0, 1.5);
  auto one = [](double) { return std::complex<double>(1.0); };
  EXPECT_NEAR(ls_integral(one, d, 1.0, Interval::Closed).real(), 1.5, 1e-15);
  EXPECT_EQ(ls_integral(one, d, 1.0, Interval::HalfOpen), std::complex<double>(0.0));
}

TEST(LsIntegral, RandomizedInequalitiesAndLinearity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Measure m = random_measure(rng, {3, 2, 2, 1.0 + trial * 0.1, false});
    Measure m2 = random_measure(rng, {2, 1, 1, 0.7, false});
    double c0 = u(rng), c1 = u(rng), c2 = u(rng);
    auto g = [=](double x) { return std::complex<double>(c0 + c1 * std::cos(5 * x), c2 * x * x); };
    auto g2 = [](double x) { return std::complex<double>(std::sin(3 * x)); };
    double sup = 0.0;
    for (int i = 0; i <= 2000; ++i) sup = std::max(sup, std::abs(g(i / 2000.0)));
    auto full = ls_integral(g, m);
    EXPECT_LE(std::abs(full), sup * total_variation(m) + 1e-12);
    double a = 0.1 + 0.3 * std::abs(u(rng)), b = 0.6 + 0.3 * std::abs(u(rng));
    Measure v = tv_function(m);
    auto lhs = ls_integral(g, m, a, b, Interval::Closed);
    auto rhs = ls_integral([&](double x) { return std::complex<double>(std::abs(g(x))); }, v, a, b, Interval::Closed);
    EXPECT_LE(std::abs(lhs), rhs.real() + 1e-12);
    auto lin_g = ls_integral([&](double x) { return 2.0 * g(x) - 3.0 * g2(x); }, m);
    EXPECT_NEAR(std::abs(lin_g - (2.0 * full - 3.0 * ls_integral(g2, m))), 0.0, 1e-12);
    auto lin_m = ls_integral(g, m + m2);
    EXPECT_NEAR(std::abs(lin_m - (full + ls_integral(g, m2))), 0.0, 1e-12);
  }
}

TEST(RampSequence, ValuesAndWeakStarGap) {
  EXPECT_NEAR(ramp_sequence(1).eval(1.0), 0.5, 1e-15);
  EXPECT_NEAR(ramp_sequence(2).eval(0.75), 0.5, 1e-15);
  EXPECT_NEAR(ramp_sequence(2).eval(1.0), 1.0, 1e-15);
  EXPECT_THROW(ramp_sequence(0), DomainError);
  auto sq = [](double x) { return std::complex<double>(x * x); };
  EXPECT_NEAR(ls_integral(sq, ramp_sequence(1000)).real(), 0.25, 1e-3);
  double prev = 1.0;
  for (int m : {10, 100, 1000, 10000}) {
    Measure diff = ramp_sequence(m) + Measure::dirac(0.5, -1.0);
    EXPECT_NEAR(diff.sup_norm(), 1.0, 1e-12);
    double err = std::abs(ls_integral(sq, ramp_sequence(m)).real() - 0.25);
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(MeasureMisc, FunctionIntegralAndJsonRoundTrip) {
  EXPECT_NEAR(Measure::lebesgue().function_integral(), 0.5, 1e-15);
  EXPECT_NEAR(Measure::dirac(0.25, 2.0).function_integral(), 1.5, 1e-15);
  std::mt19937_64 rng(5);
  Measure m = random_measure(rng, {3, 2, 2, 1.0, true});
  double oracle = simpson([&](double x) { return m.eval(x); }, 0.0, 1.0, 400000);
  EXPECT_NEAR(m.function_integral(), oracle, 1e-4);
  Measure back = measure_from_json(to_json(m));
  EXPECT_EQ(to_json(back), to_json(m));
  EXPECT_THROW(measure_from_json("{\"atoms\":[{\"x\":2.0,\"w\":1}]}"), ParseError);
  EXPECT_THROW(measure_from_json("not json"), ParseError);
}

TEST(MeasureMisc, TaylorShiftAndRoots) {
  auto c = taylor_shift({1.0, 2.0, 3.0}, 0.5);  // 1 + 2(t+.5) + 3(t+.5)^2
  EXPECT_NEAR(c[0], 1.0 + 1.0 + 0.75, 1e-15);
  EXPECT_NEAR(c[1], 2.0 + 3.0, 1e-15);
  EXPECT_NEAR(c[2], 3.0, 1e-15);
  auto r = real_roots_in({-0.06, 0.5, -1.0}, 0.0, 1.0);  // -(t-0.2)(t-0.3)
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], 0.2, 1e-14);
  EXPECT_NEAR(r[1], 0.3, 1e-14);
}
