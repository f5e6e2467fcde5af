#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pinchloc {

/// Point or displacement in the plane, metres.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Geometry cannot identify the target (singular Fisher information).
class UnlocalizableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few anchors to form a rank-2 information matrix.
class RankError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double error_estimate, double value)
      : std::runtime_error(what), error_estimate_(error_estimate), value_(value) {}

  double error_estimate() const noexcept { return error_estimate_; }
  double value() const noexcept { return value_; }

 private:
  double error_estimate_;
  double value_;
};

/// Distance-candidate selection could not rank candidates.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pinchloc
