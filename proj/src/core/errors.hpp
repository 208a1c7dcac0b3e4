#ifndef FB_CORE_ERRORS_HPP
#define FB_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fb {

// Error categories map to process exit codes: 2 config, 3 data, 4 numeric.
enum class ErrorCategory { Config = 2, Data = 3, Numeric = 4 };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), cat_(cat) {}
  ErrorCategory category() const { return cat_; }

private:
  ErrorCategory cat_;
};

#define FB_DEFINE_ERROR(Name, Cat)                                  \
  class Name : public Error {                                       \
  public:                                                           \
    explicit Name(const std::string& msg)                           \
        : Error(ErrorCategory::Cat, std::string(#Name ": ") + msg) {} \
  };

FB_DEFINE_ERROR(ConfigError, Config)
FB_DEFINE_ERROR(SchemaError, Config)

FB_DEFINE_ERROR(ParseError, Data)
FB_DEFINE_ERROR(GridError, Data)
FB_DEFINE_ERROR(DataError, Data)
FB_DEFINE_ERROR(DegenerateColumnError, Data)
FB_DEFINE_ERROR(DegenerateDataError, Data)
FB_DEFINE_ERROR(DomainMismatchError, Data)
FB_DEFINE_ERROR(PredictionError, Data)
FB_DEFINE_ERROR(EvalError, Data)
FB_DEFINE_ERROR(SupportError, Data)

FB_DEFINE_ERROR(DimensionError, Numeric)
FB_DEFINE_ERROR(RangeError, Numeric)
FB_DEFINE_ERROR(DomainError, Numeric)
FB_DEFINE_ERROR(InfeasibleDfError, Numeric)
FB_DEFINE_ERROR(EmptyBasisError, Numeric)
FB_DEFINE_ERROR(SingularSystemError, Numeric)
FB_DEFINE_ERROR(ResampleError, Numeric)
FB_DEFINE_ERROR(DegenerateSmoothnessError, Numeric)
FB_DEFINE_ERROR(RangeZeroError, Numeric)

#undef FB_DEFINE_ERROR

}  // namespace fb

#endif
