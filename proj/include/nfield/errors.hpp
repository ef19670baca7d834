#pragma once

#include <stdexcept>
#include <string>

namespace nfield {

// Base of every error raised by the library. Subclasses name the failure so
// callers can catch the cases they know how to recover from.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NFIELD_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

NFIELD_DEFINE_ERROR(InvalidArgument);
NFIELD_DEFINE_ERROR(ConfigError);
NFIELD_DEFINE_ERROR(EmptyInput);
NFIELD_DEFINE_ERROR(NonConvergence);
NFIELD_DEFINE_ERROR(SingularJacobian);
NFIELD_DEFINE_ERROR(ResonantParameter);
NFIELD_DEFINE_ERROR(DegenerateClass);
NFIELD_DEFINE_ERROR(RankConditionFailed);
NFIELD_DEFINE_ERROR(ResonantSolution);
NFIELD_DEFINE_ERROR(ResonantTruncation);
NFIELD_DEFINE_ERROR(EigenvalueHit);
NFIELD_DEFINE_ERROR(ContourHitsEigenvalue);
NFIELD_DEFINE_ERROR(DegenerateEigenfunction);
NFIELD_DEFINE_ERROR(NoCrossing);
NFIELD_DEFINE_ERROR(LostTracking);
NFIELD_DEFINE_ERROR(BlowUp);
NFIELD_DEFINE_ERROR(NoOscillation);

#undef NFIELD_DEFINE_ERROR

}  // namespace nfield
