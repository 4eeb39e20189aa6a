#include "breather/richardson.hpp"

#include <stdexcept>
#include <vector>

namespace breather {

double richardson_derivative(const std::function<double(double)>& f, double s, double h, int levels) {
  if (!(h > 0.0)) throw std::invalid_argument("richardson_derivative: step must be positive");
  if (levels < 0 || levels > 6) throw std::invalid_argument("richardson_derivative: levels must be in 0..6");
  std::vector<double> row;
  double k = h;
  for (int i = 0; i <= levels; ++i, k *= 0.5) row.push_back((f(s + k) - f(s - k)) / (2.0 * k));
  double factor = 4.0;
  for (int lev = 1; lev <= levels; ++lev, factor *= 4.0) {
    for (int i = levels; i >= lev; --i) row[i] = (factor * row[i] - row[i - 1]) / (factor - 1.0);
  }
  return row[levels];
}

}  // namespace breather
