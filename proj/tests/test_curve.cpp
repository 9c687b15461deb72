#include "frc/curve.hpp"
#include "frc/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace frc;
using frc::testing::naive_eval;
using frc::testing::raw;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected frc::Error");
  return ErrorCode::InvalidParams;
}

PwlCurve ramp() { return make_curve({{-0.1, 5.0}, {0.0, 0.0}}, 0.0, 0.0); }

}  // namespace

TEST_CASE("make_curve builds and validates") {
  const auto zero = make_curve({{0.0, 0.0}}, 0.0, 0.0);
  CHECK(zero.size() == 1);
  CHECK(zero.eval(-0.5) == 0.0);

  const auto three = make_curve({{0.1, -5.0}, {-0.1, 5.0}, {0.0, 0.0}}, 0.0, 0.0);
  CHECK(three.size() == 3);
  CHECK(three.breakpoints()[0].df == -0.1);
  CHECK(three.eval(-0.05) == doctest::Approx(2.5).epsilon(1e-15));

  CHECK(code_of([] { make_curve({{0.0, 0.0}, {0.0, 1.0}}, 0, 0); }) ==
        ErrorCode::NonMonotoneBreakpoints);
  CHECK(code_of([] { make_curve({{0.0, 0.0}, {5e-13, 1.0}}, 0, 0); }) ==
        ErrorCode::NonMonotoneBreakpoints);
  CHECK(code_of([] { make_curve({}, 0, 0); }) == ErrorCode::EmptyCurve);
  CHECK(code_of([] { make_curve({{NAN, 0.0}}, 0, 0); }) == ErrorCode::NonFiniteValue);
  CHECK(code_of([] { make_curve({{0.0, 0.0}}, INFINITY, 0); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("eval interpolates inside and extends outside") {
  CHECK(ramp().eval(-0.2) == 5.0);
  CHECK(ramp().eval(-0.05) == doctest::Approx(2.5));
  CHECK(ramp().eval(0.3) == 0.0);
  const auto sloped = make_curve({{-0.1, 5.0}, {0.0, 0.0}}, -10.0, -20.0);
  CHECK(sloped.eval(-0.3) == doctest::Approx(7.0));
  CHECK(sloped.eval(0.5) == doctest::Approx(-10.0));
  CHECK(code_of([] { ramp().eval(NAN); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("slope_at uses the left piece at a breakpoint") {
  const auto c = make_curve({{-0.3, 10.0}, {-0.1, 0.0}, {0.1, 0.0}}, -1.0, -2.0);
  CHECK(c.slope_at(-0.5) == -1.0);
  CHECK(c.slope_at(-0.3) == -1.0);
  CHECK(c.slope_at(-0.2) == doctest::Approx(-50.0));
  CHECK(c.slope_at(-0.1) == doctest::Approx(-50.0));
  CHECK(c.slope_at(0.0) == 0.0);
  CHECK(c.slope_at(0.2) == -2.0);
}

TEST_CASE("add matches the dense-sample oracle") {
  SUBCASE("additive identity") {
    const auto a = ramp();
    const auto s = add(a, PwlCurve::zero());
    for (double x : testing::dense_grid(1001)) CHECK(s.eval(x) == a.eval(x));
  }
  SUBCASE("two pure slopes") {
    const auto a = PwlCurve::linear(-833.33);
    const auto s = add(a, a);
    CHECK(s.left_slope() == doctest::Approx(-1666.66));
    CHECK(s.right_slope() == doctest::Approx(-1666.66));
    for (double x : testing::dense_grid(10000)) {
      CHECK(std::abs(s.eval(x) - (-1666.66 * x)) <= testing::pointwise_tol(1666.66 * x));
    }
  }
  SUBCASE("random 5 + 7 point curves") {
    std::mt19937_64 rng(11);
    const auto a = testing::random_curve(rng, 5, false);
    const auto b = testing::random_curve(rng, 7, false);
    const auto s = add(a, b);
    CHECK(s.size() == 12);
    const auto ra = raw(a);
    const auto rb = raw(b);
    for (double x : testing::dense_grid(10000, -2.0, 2.0)) {
      const double expect = naive_eval(ra, x) + naive_eval(rb, x);
      CHECK(std::abs(s.eval(x) - expect) <= testing::pointwise_tol(expect));
    }
  }
  SUBCASE("coincident breakpoints merge") {
    const auto s = add(ramp(), ramp());
    CHECK(s.size() == 2);
    CHECK(s.eval(-0.1) == 10.0);
  }
}

TEST_CASE("scale") {
  const auto a = ramp();
  const auto zero = scale(a, 0.0);
  for (double x : testing::dense_grid(101)) CHECK(zero.eval(x) == 0.0);
  CHECK(scale(a, 1.0) == a);
  const auto two = scale(a, 2.0);
  CHECK(two.breakpoints()[0] == Breakpoint{-0.1, 10.0});
  CHECK(two.breakpoints()[1] == Breakpoint{0.0, 0.0});
  for (double x : testing::dense_grid(1000)) CHECK(two.eval(x) == doctest::Approx(2 * a.eval(x)));
  CHECK(code_of([&] { scale(a, NAN); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("subtract inverts add") {
  std::mt19937_64 rng(5);
  const auto a = testing::random_curve(rng, 6, false);
  const auto b = testing::random_curve(rng, 4, true);
  const auto self = subtract(a, a);
  for (double x : testing::dense_grid(1000, -3, 3)) CHECK(self.eval(x) == 0.0);

  const auto back = subtract(add(a, b), b);
  const auto ra = raw(a);
  for (double x : testing::dense_grid(10000, -2, 2)) {
    const double expect = naive_eval(ra, x);
    CHECK(std::abs(back.eval(x) - expect) <= testing::pointwise_tol(expect));
  }
  const auto same = subtract(a, PwlCurve::zero());
  for (double x : testing::dense_grid(1000)) {
    CHECK(std::abs(same.eval(x) - a.eval(x)) <= testing::pointwise_tol(a.eval(x)));
  }
}

TEST_CASE("invert_monotone") {
  const auto slope = PwlCurve::linear(-833.33);
  CHECK(invert_monotone(slope, 500.0, Direction::Under) == doctest::Approx(-500.0 / 833.33));
  // 1.0 * 50000 MW / 60 Hz.
  const auto damping = PwlCurve::linear(-50000.0 / 60.0);
  CHECK(invert_monotone(damping, 500.0, Direction::Under) == doctest::Approx(-0.6).epsilon(1e-14));
  CHECK(invert_monotone(slope, 0.0, Direction::Under) == 0.0);

  const auto saturating = make_curve({{-0.2, 10.0}, {0.0, 0.0}}, 0.0, 0.0);
  CHECK(code_of([&] { invert_monotone(saturating, 20.0, Direction::Under); }) ==
        ErrorCode::TargetUnreachable);
  CHECK(code_of([&] { invert_monotone(saturating, -1.0, Direction::Over); }) ==
        ErrorCode::TargetUnreachable);
  CHECK(invert_monotone(saturating, 10.0, Direction::Under) == doctest::Approx(-0.2));

  SUBCASE("flat piece resolves to the endpoint nearest zero") {
    const auto deadband = make_curve({{-0.3, 10.0}, {-0.1, 0.0}, {0.1, 0.0}, {0.3, -10.0}}, 0, 0);
    CHECK(invert_monotone(deadband, 0.0, Direction::Under) == 0.0);
    CHECK(invert_monotone(deadband, 0.0, Direction::Over) == 0.0);
    const auto shelf = make_curve({{-0.5, 20.0}, {-0.3, 10.0}, {-0.2, 10.0}, {0.0, 0.0}}, -5, -5);
    CHECK(invert_monotone(shelf, 10.0, Direction::Under) == doctest::Approx(-0.2));
  }
  SUBCASE("rejects increasing curves") {
    const auto up = make_curve({{0.0, 0.0}, {1.0, 1.0}}, 0, 0);
    CHECK(code_of([&] { invert_monotone(up, 0.5, Direction::Under); }) == ErrorCode::NotMonotone);
  }
}

TEST_CASE("simplify") {
  const auto collinear = make_curve({{-1.0, 1.0}, {0.0, 0.0}, {1.0, -1.0}}, 0.0, 0.0);
  const auto s = simplify(collinear, 0.0);
  CHECK(s.size() == 2);
  for (double x : testing::dense_grid(100, -2, 2)) CHECK(s.eval(x) == collinear.eval(x));

  const auto minimal = make_curve({{-0.3, 10.0}, {-0.1, 0.0}, {0.1, 0.0}, {0.3, -10.0}}, 0, 0);
  CHECK(simplify(minimal, 0.0) == minimal);

  SUBCASE("end points collinear with the extensions go") {
    const auto line = make_curve({{-1.0, 2.0}, {0.0, 0.0}, {1.0, -2.0}}, -2.0, -2.0);
    CHECK(simplify(line, 0.0).size() == 1);
  }

  SUBCASE("add/subtract cycles collapse back to the fresh build") {
    std::mt19937_64 rng(3);
    const auto a = testing::random_curve(rng, 5, true);
    const auto b = testing::random_curve(rng, 5, true);
    const auto fresh = simplify(add(a, b), 1e-9);
    auto cycled = add(a, b);
    for (int i = 0; i < 100; ++i) {
      const auto c = testing::random_curve(rng, 3, true);
      cycled = subtract(add(cycled, c), c);
    }
    CHECK(cycled.size() > fresh.size());
    const auto cleaned = simplify(cycled, 1e-9);
    CHECK(cleaned.size() == fresh.size());
    CHECK(max_abs_difference(cleaned, fresh, -3, 3) <= 1e-9);
  }

  SUBCASE("stays within tolerance and is a fixpoint") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      const auto c = testing::random_curve(rng, 12, trial % 2 == 0);
      const double tol = trial < 25 ? 0.0 : 5.0;
      const auto once = simplify(c, tol);
      const auto rc = raw(c);
      for (double x : testing::dense_grid(2000, -2, 2)) {
        CHECK(std::abs(once.eval(x) - naive_eval(rc, x)) <= tol + 1e-9);
      }
      const auto twice = simplify(once, tol);
      if (tol == 0.0) CHECK(twice == once);
      CHECK(max_abs_difference(twice, once, -2, 2) <= tol + 1e-9);
    }
  }
}

TEST_CASE("curve CSV has the documented header and rows") {
  std::ostringstream out;
  write_curve_csv(out, ramp(), 60.0);
  CHECK(out.str() == "delta_f_hz,freq_hz,response_mw\n-0.1,59.9,5\n0,60,0\n");

  std::ostringstream dense;
  write_curve_csv(dense, ramp(), 60.0, 0.5);
  // Two breakpoints then samples at -1, -0.5, 0.
  CHECK(dense.str() ==
        "delta_f_hz,freq_hz,response_mw\n-0.1,59.9,5\n0,60,0\n-1,59,5\n-0.5,59.5,5\n0,60,0\n");
}

TEST_CASE("sum of non-increasing curves stays non-increasing") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const auto s = add(testing::random_curve(rng, 4, true), testing::random_curve(rng, 6, true));
    CHECK(s.is_non_increasing(0.0));
  }
}
