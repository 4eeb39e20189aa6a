#pragma once

#include <functional>

namespace breather {

/// Central difference of f at s with step h, improved by `levels` rounds of
/// Richardson extrapolation (each halves the step and removes the next even
/// power of h).  levels = 0 is the plain O(h^2) difference.
double richardson_derivative(const std::function<double(double)>& f, double s, double h, int levels = 1);

}  // namespace breather
