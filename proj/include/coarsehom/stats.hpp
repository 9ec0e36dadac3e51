#pragma once

#include <span>
#include <vector>

namespace coarsehom {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares on (log x, log y); all values must be positive.
LinearFit fit_log_log(std::span<const double> x, std::span<const double> y);

/// Number of worker threads: COARSEHOM_THREADS if set and positive, else the
/// hardware concurrency (at least 1).
unsigned worker_count();

}  // namespace coarsehom
