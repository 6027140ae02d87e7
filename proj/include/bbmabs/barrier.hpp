#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bbmabs/analytic.hpp"

namespace bbmabs {

struct ConstantBarrier {
  double level;
};

// Knots are (time, level) pairs with strictly increasing times; the level is
// linear between knots.  The barrier is undefined past the last knot.
struct PiecewiseLinearBarrier {
  std::vector<std::pair<double, double>> knots;
};

// L(s) = c (t_end - s)^{1/3}; reaches zero at t_end.
struct CurvedBarrier {
  double t_end;
};

// Geometry of the right absorbing boundary.  Immutable once constructed.
class Barrier {
 public:
  static Barrier constant(double level);
  static Barrier piecewise_linear(std::vector<std::pair<double, double>> knots);
  static Barrier curved(double t_end);

  double level(double s) const;
  double slope(double s) const;  // right derivative at s

  // Secant line through (s1, level(s1)) and (s2, level(s2)), expressed
  // relative to s1.  For the curved variant the chord lies below the true
  // boundary (concavity), so killing at the chord is conservative.
  analytic::LineBoundary chord(double s1, double s2) const;

  // Last time at which the barrier is defined; +inf for the constant variant.
  double domain_end() const;

  bool is_curved() const { return std::holds_alternative<CurvedBarrier>(v_); }
  bool is_constant() const { return std::holds_alternative<ConstantBarrier>(v_); }

  // Config syntax: constant:<L> | curved:<t_end> | pl:<t0>:<L0>,<t1>:<L1>,...
  std::string to_config() const;
  static Barrier parse(std::string_view text);

  // Next knot time strictly after s (+inf if none); constant/curved barriers
  // have no knots.  Used by the engine to keep steps inside linear segments.
  double next_knot_after(double s) const;

 private:
  explicit Barrier(std::variant<ConstantBarrier, PiecewiseLinearBarrier, CurvedBarrier> v)
      : v_(std::move(v)) {}
  std::variant<ConstantBarrier, PiecewiseLinearBarrier, CurvedBarrier> v_;
};

}  // namespace bbmabs
