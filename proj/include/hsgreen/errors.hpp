// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch broadly; the CLI maps per-point failures to output flags instead of
// aborting a batch.
#pragma once

#include <stdexcept>
#include <string>

namespace hsgreen {

// Real-axis branch point touched (Re beta = 0 with Im k = 0); only possible
// in the undamped elastic limit. Caller must add damping or move the grid.
struct BranchDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoincidentPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Source placed on or above the free surface (xi3 >= 0).
struct SurfaceSource : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |beta_m| below threshold; the mode normalization e^{beta xi3}/beta divides
// by it.
struct ModeDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// nu2 and nu3 parallel; happens exactly on the line eta1 = 0.
struct DegenerateBasis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// x3 + xi3 above the near-surface exclusion floor.
struct NearSurfaceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Auto truncation bound cannot be met (no exponential decay available).
struct DecayViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hsgreen
