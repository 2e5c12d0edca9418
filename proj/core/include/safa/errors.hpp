#pragma once

#include <stdexcept>
#include <string>

namespace safa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SAFA_DECLARE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

SAFA_DECLARE_ERROR(GeometryError);
SAFA_DECLARE_ERROR(IndexError);
SAFA_DECLARE_ERROR(ShapeError);
SAFA_DECLARE_ERROR(DomainError);
SAFA_DECLARE_ERROR(ScheduleError);
SAFA_DECLARE_ERROR(NumericalError);
SAFA_DECLARE_ERROR(DegenerateInput);
SAFA_DECLARE_ERROR(RankError);
SAFA_DECLARE_ERROR(SingularError);
SAFA_DECLARE_ERROR(QuadratureError);
SAFA_DECLARE_ERROR(ConfigError);
// Malformed tensor files (bad magic, truncated payload, shape mismatch).
SAFA_DECLARE_ERROR(FormatError);

#undef SAFA_DECLARE_ERROR

}  // namespace safa
