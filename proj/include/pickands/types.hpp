#pragma once

#include <cstdint>
#include <stdexcept>

namespace pickands {

// Thrown when a computation fails numerically (indefinite covariance beyond
// tolerance, failed embedding with no fallback, ...). Domain violations of the
// public API throw std::invalid_argument instead.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Monte Carlo summary. stderr is a macro in <cstdio>, hence std_error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  double grid_step = 0.0;
  bool unreliable = false;   // rare-event run: fewer than 10 observed hits
  bool coarse_grid = false;  // step too coarse for the requested level
};

// Execution policy for chunked Monte Carlo loops. Results depend on the chunk
// size but never on the worker count: chunk c always consumes RNG substream c
// and partial results are combined in chunk order.
struct ExecPolicy {
  unsigned workers = 1;
  std::uint64_t chunk = 16384;
};

}  // namespace pickands
