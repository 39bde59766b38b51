#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mre {

/// Error with a stable machine-readable kind, surfaced as JSON by the CLI.
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

  private:
    std::string kind_;
};

#define MRE_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                             \
      public:                                                               \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

MRE_DEFINE_ERROR(DiscretizationError);
MRE_DEFINE_ERROR(NearResonance);
MRE_DEFINE_ERROR(SingularSystem);
MRE_DEFINE_ERROR(InsufficientResolution);
MRE_DEFINE_ERROR(IncompatibleBoundaryData);
MRE_DEFINE_ERROR(ZeroCoefficient);
MRE_DEFINE_ERROR(HalfPlaneSplitViolation);
MRE_DEFINE_ERROR(DegenerateInput);
MRE_DEFINE_ERROR(NonzeroTrace);
MRE_DEFINE_ERROR(UnboundedWeightedField);
MRE_DEFINE_ERROR(ContrastViolation);
MRE_DEFINE_ERROR(MissingData);
MRE_DEFINE_ERROR(ConfigError);
MRE_DEFINE_ERROR(IoError);

#undef MRE_DEFINE_ERROR

}  // namespace mre
