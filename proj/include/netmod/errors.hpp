#pragma once

#include <stdexcept>
#include <string>

namespace netmod {

// Base for everything this library throws. Callers who don't care about the
// exact failure can catch this one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define NETMOD_ERROR_TYPE(Name)                                    \
    struct Name : Error {                                          \
        explicit Name(const std::string& what) : Error(what) {}    \
    }

// matrix / factorization layer
NETMOD_ERROR_TYPE(InvalidDims);
NETMOD_ERROR_TYPE(DimMismatch);
NETMOD_ERROR_TYPE(Singular);
NETMOD_ERROR_TYPE(RankDeficient);
NETMOD_ERROR_TYPE(NoConvergence);
NETMOD_ERROR_TYPE(NotHermitian);
NETMOD_ERROR_TYPE(NotPSD);

// joint-triangularization layer
NETMOD_ERROR_TYPE(DeterminantMismatch);
NETMOD_ERROR_TYPE(DeterminantNotOne);
NETMOD_ERROR_TYPE(DeterminantNotUnit);
NETMOD_ERROR_TYPE(PreconditionViolated);
NETMOD_ERROR_TYPE(NotReal);
NETMOD_ERROR_TYPE(DegenerateEqualDiagonal);
NETMOD_ERROR_TYPE(Infeasible);
NETMOD_ERROR_TYPE(NumericalBreakdown);
NETMOD_ERROR_TYPE(InsufficientBlocks);

// scheme layer
NETMOD_ERROR_TYPE(RateMismatch);
NETMOD_ERROR_TYPE(InvalidParams);

// file I/O layer
NETMOD_ERROR_TYPE(ParseError);

#undef NETMOD_ERROR_TYPE

}  // namespace netmod
