#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace frc {

/// Minimum separation between two distinct breakpoints, Hz.
inline constexpr double kBreakpointGapHz = 1e-12;
/// Pointwise equality tolerance between curves, MW.
inline constexpr double kPointwiseTolMw = 1e-9;

struct Breakpoint {
  double df;  ///< frequency deviation f - f0, Hz (negative is under-frequency)
  double mw;  ///< corrective power, MW

  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

enum class Direction { Under, Over };

/// Continuous piecewise-linear map from frequency deviation (Hz) to power (MW).
///
/// Between breakpoints the function interpolates linearly; outside the span it
/// extends affinely with `left_slope()` / `right_slope()` (MW/Hz). Instances are
/// immutable once built and every operation below is a pure function.
class PwlCurve {
public:
  /// Sorts `points` by df and validates. Throws EmptyCurve,
  /// NonMonotoneBreakpoints (gap below kBreakpointGapHz) or NonFiniteValue.
  static PwlCurve make(std::vector<Breakpoint> points, double left_slope, double right_slope);

  /// Zero everywhere; one breakpoint at the origin.
  static PwlCurve zero();

  /// Straight line through the origin with the given slope.
  static PwlCurve linear(double slope_mw_per_hz);

  std::span<const Breakpoint> breakpoints() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double left_slope() const noexcept { return left_slope_; }
  double right_slope() const noexcept { return right_slope_; }

  double eval(double df) const;

  /// Slope of the piece containing `df`. At an exact breakpoint the piece on
  /// the left (more negative df) is used.
  double slope_at(double df) const;

  /// True when every piece, extensions included, has slope <= tol_mw scaled
  /// by the local value magnitude.
  bool is_non_increasing(double tol_mw = kPointwiseTolMw) const;

  friend bool operator==(const PwlCurve&, const PwlCurve&) = default;

private:
  PwlCurve(std::vector<Breakpoint> points, double left_slope, double right_slope)
      : points_(std::move(points)), left_slope_(left_slope), right_slope_(right_slope) {}

  std::vector<Breakpoint> points_;
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
};

PwlCurve make_curve(std::vector<std::pair<double, double>> points, double left_slope,
                    double right_slope);

double eval(const PwlCurve& curve, double df);

/// Pointwise sum over the union of both breakpoint sets.
PwlCurve add(const PwlCurve& a, const PwlCurve& b);
PwlCurve subtract(const PwlCurve& a, const PwlCurve& b);
PwlCurve scale(const PwlCurve& curve, double k);

/// Solves eval(curve, df) == target on a non-increasing curve.
///
/// When the preimage is an interval (a flat piece at exactly `target`) the
/// point of that interval closest to df = 0 is returned. `direction` names the
/// expected sign branch; a preimage that contains the origin resolves to 0 on
/// either branch, otherwise the preimage already lies on a single side.
/// Throws NotMonotone or TargetUnreachable.
double invert_monotone(const PwlCurve& curve, double target, Direction direction);

/// Drops breakpoints whose removal moves the function by at most `tol` MW.
/// End breakpoints are dropped when collinear with their extension slope.
/// At least one breakpoint always remains.
PwlCurve simplify(const PwlCurve& curve, double tol);

/// max |a(df) - b(df)| over [lo, hi]. Exact: the difference is itself
/// piecewise linear, so only breakpoints and the interval ends are checked.
double max_abs_difference(const PwlCurve& a, const PwlCurve& b, double lo, double hi);

/// Writes `delta_f_hz,freq_hz,response_mw` rows: each breakpoint, then when
/// `dense_step_hz` is set, the rows produced by `resample`.
void write_curve_csv(std::ostream& out, const PwlCurve& curve, double f0,
                     std::optional<double> dense_step_hz = std::nullopt);

/// Samples on a grid of multiples of `step_hz` covering the breakpoint span
/// widened to at least [-1 Hz, 0 Hz].
std::vector<Breakpoint> resample(const PwlCurve& curve, double step_hz);

}  // namespace frc
