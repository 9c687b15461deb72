#include "frc/curve.hpp"

#include "frc/error.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace frc {
namespace {

bool finite(double x) { return std::isfinite(x); }

double interpolate(const Breakpoint& a, const Breakpoint& b, double df) {
  const double t = (df - a.df) / (b.df - a.df);
  return a.mw + t * (b.mw - a.mw);
}

// Scale-aware zero test for slopes and value steps.
bool negligible(double x, double scale_hint, double tol) {
  return std::abs(x) <= tol * std::max(1.0, std::abs(scale_hint));
}

}  // namespace

PwlCurve PwlCurve::make(std::vector<Breakpoint> points, double left_slope, double right_slope) {
  if (points.empty()) {
    throw Error(ErrorCode::EmptyCurve, "curve needs at least one breakpoint");
  }
  if (!finite(left_slope) || !finite(right_slope)) {
    throw Error(ErrorCode::NonFiniteValue, "extension slope is not finite");
  }
  for (const auto& p : points) {
    if (!finite(p.df) || !finite(p.mw)) {
      throw Error(ErrorCode::NonFiniteValue, "breakpoint is not finite");
    }
  }
  std::sort(points.begin(), points.end(),
            [](const Breakpoint& a, const Breakpoint& b) { return a.df < b.df; });
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].df - points[i - 1].df < kBreakpointGapHz) {
      throw Error(ErrorCode::NonMonotoneBreakpoints,
                  fmt::format("breakpoints at df={} and df={} are not distinct", points[i - 1].df,
                              points[i].df));
    }
  }
  return PwlCurve(std::move(points), left_slope, right_slope);
}

PwlCurve PwlCurve::zero() { return PwlCurve({{0.0, 0.0}}, 0.0, 0.0); }

PwlCurve PwlCurve::linear(double slope_mw_per_hz) {
  if (!finite(slope_mw_per_hz)) {
    throw Error(ErrorCode::NonFiniteValue, "slope is not finite");
  }
  return PwlCurve({{0.0, 0.0}}, slope_mw_per_hz, slope_mw_per_hz);
}

double PwlCurve::eval(double df) const {
  if (!finite(df)) {
    throw Error(ErrorCode::NonFiniteValue, "cannot evaluate at a non-finite deviation");
  }
  const auto& first = points_.front();
  const auto& last = points_.back();
  if (df <= first.df) {
    return first.mw + left_slope_ * (df - first.df);
  }
  if (df >= last.df) {
    return last.mw + right_slope_ * (df - last.df);
  }
  auto hi = std::upper_bound(points_.begin(), points_.end(), df,
                             [](double x, const Breakpoint& p) { return x < p.df; });
  return interpolate(*(hi - 1), *hi, df);
}

double PwlCurve::slope_at(double df) const {
  if (!finite(df)) {
    throw Error(ErrorCode::NonFiniteValue, "cannot take slope at a non-finite deviation");
  }
  if (df <= points_.front().df) return left_slope_;
  if (df > points_.back().df) return right_slope_;
  // First breakpoint with p.df >= df closes the piece on the left.
  auto hi = std::lower_bound(points_.begin(), points_.end(), df,
                             [](const Breakpoint& p, double x) { return p.df < x; });
  const auto& a = *(hi - 1);
  const auto& b = *hi;
  return (b.mw - a.mw) / (b.df - a.df);
}

bool PwlCurve::is_non_increasing(double tol_mw) const {
  if (left_slope_ > tol_mw * std::max(1.0, std::abs(points_.front().mw))) return false;
  if (right_slope_ > tol_mw * std::max(1.0, std::abs(points_.back().mw))) return false;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double step = points_[i].mw - points_[i - 1].mw;
    if (step > tol_mw * std::max({1.0, std::abs(points_[i].mw), std::abs(points_[i - 1].mw)})) {
      return false;
    }
  }
  return true;
}

PwlCurve make_curve(std::vector<std::pair<double, double>> points, double left_slope,
                    double right_slope) {
  std::vector<Breakpoint> bps;
  bps.reserve(points.size());
  for (auto [df, mw] : points) bps.push_back({df, mw});
  return PwlCurve::make(std::move(bps), left_slope, right_slope);
}

double eval(const PwlCurve& curve, double df) { return curve.eval(df); }

PwlCurve add(const PwlCurve& a, const PwlCurve& b) {
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  for (const auto& p : a.breakpoints()) xs.push_back(p.df);
  for (const auto& p : b.breakpoints()) xs.push_back(p.df);
  std::sort(xs.begin(), xs.end());

  std::vector<Breakpoint> merged;
  merged.reserve(xs.size());
  for (double x : xs) {
    if (!merged.empty() && x - merged.back().df < kBreakpointGapHz) continue;
    merged.push_back({x, a.eval(x) + b.eval(x)});
  }
  return PwlCurve::make(std::move(merged), a.left_slope() + b.left_slope(),
                        a.right_slope() + b.right_slope());
}

PwlCurve scale(const PwlCurve& curve, double k) {
  if (!finite(k)) {
    throw Error(ErrorCode::NonFiniteValue, "scale factor is not finite");
  }
  std::vector<Breakpoint> pts(curve.breakpoints().begin(), curve.breakpoints().end());
  for (auto& p : pts) p.mw *= k;
  return PwlCurve::make(std::move(pts), k * curve.left_slope(), k * curve.right_slope());
}

PwlCurve subtract(const PwlCurve& a, const PwlCurve& b) { return add(a, scale(b, -1.0)); }

double invert_monotone(const PwlCurve& curve, double target, Direction direction) {
  (void)direction;
  if (!finite(target)) {
    throw Error(ErrorCode::NonFiniteValue, "inversion target is not finite");
  }
  if (!curve.is_non_increasing()) {
    throw Error(ErrorCode::NotMonotone, "curve must be non-increasing to invert");
  }
  const auto pts = curve.breakpoints();
  const std::size_t n = pts.size();
  const double inf = std::numeric_limits<double>::infinity();

  // Roundoff-level positive slopes count as flat.
  const double left = std::min(0.0, curve.left_slope());
  const double right = std::min(0.0, curve.right_slope());
  const bool left_flat = negligible(left, pts.front().mw, kPointwiseTolMw);
  const bool right_flat = negligible(right, pts.back().mw, kPointwiseTolMw);

  const double sup = left_flat ? pts.front().mw : inf;
  const double inf_val = right_flat ? pts.back().mw : -inf;
  if (target > sup || target < inf_val) {
    throw Error(ErrorCode::TargetUnreachable,
                fmt::format("target {} MW outside reachable range [{}, {}]", target, inf_val, sup));
  }

  // hi = sup{df : F(df) >= target}
  double hi;
  {
    std::size_t i = n;
    while (i > 0 && pts[i - 1].mw < target) --i;
    if (i == 0) {
      hi = pts.front().df + (target - pts.front().mw) / left;
    } else if (i == n) {
      hi = right_flat ? inf : pts.back().df + (target - pts.back().mw) / right;
    } else {
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      hi = a.df + (target - a.mw) * (b.df - a.df) / (b.mw - a.mw);
    }
  }
  // lo = inf{df : F(df) <= target}
  double lo;
  {
    std::size_t j = 0;
    while (j < n && pts[j].mw > target) ++j;
    if (j == n) {
      lo = pts.back().df + (target - pts.back().mw) / right;
    } else if (j == 0) {
      lo = left_flat ? -inf : pts.front().df + (target - pts.front().mw) / left;
    } else {
      const auto& a = pts[j - 1];
      const auto& b = pts[j];
      lo = a.df + (target - a.mw) * (b.df - a.df) / (b.mw - a.mw);
    }
  }
  if (lo > hi) std::swap(lo, hi);
  return std::clamp(0.0, lo, hi);
}

PwlCurve simplify(const PwlCurve& curve, double tol) {
  if (!(tol >= 0.0)) {
    throw Error(ErrorCode::NonFiniteValue, "simplify tolerance must be non-negative");
  }
  const auto pts = curve.breakpoints();
  const std::size_t n = pts.size();
  if (n <= 1) return curve;

  const double sl = curve.left_slope();
  const double sr = curve.right_slope();

  // Leftmost point s such that every earlier point lies on the left extension
  // drawn from it.
  auto left_ok = [&](std::size_t s) {
    for (std::size_t k = 0; k < s; ++k) {
      const double line = pts[s].mw + sl * (pts[k].df - pts[s].df);
      if (std::abs(line - pts[k].mw) > tol) return false;
    }
    return true;
  };
  auto right_ok = [&](std::size_t e) {
    for (std::size_t k = e + 1; k < n; ++k) {
      const double line = pts[e].mw + sr * (pts[k].df - pts[e].df);
      if (std::abs(line - pts[k].mw) > tol) return false;
    }
    return true;
  };
  std::size_t s = 0;
  while (s + 1 < n && left_ok(s + 1)) ++s;
  std::size_t e = n - 1;
  while (e > s && right_ok(e - 1)) --e;

  auto chord_ok = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = a + 1; k < b; ++k) {
      if (std::abs(interpolate(pts[a], pts[b], pts[k].df) - pts[k].mw) > tol) return false;
    }
    return true;
  };

  std::vector<Breakpoint> kept{pts[s]};
  std::size_t anchor = s;
  for (std::size_t j = s + 2; j <= e; ++j) {
    if (!chord_ok(anchor, j)) {
      anchor = j - 1;
      kept.push_back(pts[anchor]);
    }
  }
  if (e != s) kept.push_back(pts[e]);
  return PwlCurve::make(std::move(kept), sl, sr);
}

double max_abs_difference(const PwlCurve& a, const PwlCurve& b, double lo, double hi) {
  double worst = std::abs(a.eval(lo) - b.eval(lo));
  worst = std::max(worst, std::abs(a.eval(hi) - b.eval(hi)));
  for (const auto* c : {&a, &b}) {
    for (const auto& p : c->breakpoints()) {
      if (p.df > lo && p.df < hi) worst = std::max(worst, std::abs(a.eval(p.df) - b.eval(p.df)));
    }
  }
  return worst;
}

std::vector<Breakpoint> resample(const PwlCurve& curve, double step_hz) {
  if (!(step_hz > 0.0) || !finite(step_hz)) {
    throw Error(ErrorCode::InvalidParams, "resampling step must be positive");
  }
  const double lo = std::min(curve.breakpoints().front().df, -1.0);
  const double hi = std::max(curve.breakpoints().back().df, 0.0);
  const auto k0 = static_cast<long long>(std::ceil(lo / step_hz - 1e-9));
  const auto k1 = static_cast<long long>(std::floor(hi / step_hz + 1e-9));
  if (k1 - k0 > 1'000'000) {
    throw Error(ErrorCode::InvalidParams, "resampling step too small for curve span");
  }
  std::vector<Breakpoint> out;
  out.reserve(static_cast<std::size_t>(std::max(0LL, k1 - k0 + 1)));
  for (long long k = k0; k <= k1; ++k) {
    const double df = static_cast<double>(k) * step_hz;
    out.push_back({df, curve.eval(df)});
  }
  return out;
}

void write_curve_csv(std::ostream& out, const PwlCurve& curve, double f0,
                     std::optional<double> dense_step_hz) {
  out << "delta_f_hz,freq_hz,response_mw\n";
  for (const auto& p : curve.breakpoints()) {
    fmt::print(out, "{},{},{}\n", p.df, f0 + p.df, p.mw);
  }
  if (dense_step_hz) {
    for (const auto& p : resample(curve, *dense_step_hz)) {
      fmt::print(out, "{},{},{}\n", p.df, f0 + p.df, p.mw);
    }
  }
}

}  // namespace frc
