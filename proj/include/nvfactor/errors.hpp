#pragma once

#include <stdexcept>
#include <string>

namespace nvfactor {

// Base class for every domain error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NVFACTOR_DEFINE_ERROR(Name)            \
  class Name : public Error {                  \
   public:                                     \
    using Error::Error;                        \
  }

NVFACTOR_DEFINE_ERROR(InvalidArgument);
NVFACTOR_DEFINE_ERROR(NonHermitianInput);
NVFACTOR_DEFINE_ERROR(DimensionMismatch);
NVFACTOR_DEFINE_ERROR(InvalidDensityMatrix);

// factor compiler
NVFACTOR_DEFINE_ERROR(InvalidWidths);
NVFACTOR_DEFINE_ERROR(Infeasible);
NVFACTOR_DEFINE_ERROR(TooManyQubits);
NVFACTOR_DEFINE_ERROR(TooLarge);

// adiabatic engine
NVFACTOR_DEFINE_ERROR(TimeOutOfRange);
NVFACTOR_DEFINE_ERROR(DegenerateGround);
NVFACTOR_DEFINE_ERROR(NonConvergent);
NVFACTOR_DEFINE_ERROR(CommutingHamiltonians);

// pulse optimisation
NVFACTOR_DEFINE_ERROR(BoundViolation);
NVFACTOR_DEFINE_ERROR(NoProgress);

// tomography
NVFACTOR_DEFINE_ERROR(RankDeficient);

#undef NVFACTOR_DEFINE_ERROR

}  // namespace nvfactor
