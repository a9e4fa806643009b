#pragma once

#include <functional>
#include <utility>

namespace pnp {

/// Scalar function of (t, x, y) used for boundary data, fixed charge and
/// source terms. time_dependent=false promises f(t,x,y) = f(0,x,y).
struct Field {
  std::function<double(double, double, double)> fn;
  bool time_dependent = false;

  Field() : fn([](double, double, double) { return 0.0; }) {}
  Field(std::function<double(double, double, double)> f, bool varies_in_time)
      : fn(std::move(f)), time_dependent(varies_in_time)
  {
  }

  static Field constant(double v)
  {
    return Field([v](double, double, double) { return v; }, false);
  }
  static Field zero() { return constant(0.0); }

  double operator()(double t, double x, double y) const { return fn(t, x, y); }
};

}  // namespace pnp
