#pragma once

#include <stdexcept>
#include <string>

namespace apnum {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownPrimitive : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct WindowTooShort : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct EmptyComparisonWindow : Error { using Error::Error; };
struct ZeroMass : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidExponent : Error { using Error::Error; };
struct NegativeTime : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct OffGrid : Error { using Error::Error; };
struct TooManySamples : Error { using Error::Error; };
struct EmptyOverlap : Error { using Error::Error; };
struct UnknownScenario : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

}  // namespace apnum
