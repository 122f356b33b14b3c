#pragma once

#include <stdexcept>

namespace elastirank {

/// Base class for every error raised by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input data violates the ingestion contract (unknown ids, malformed rows,
/// empty dataset after filtering).
struct IngestionError : Error {
    using Error::Error;
};

/// A utility vector has no mass to normalize.
struct DegenerateUtilityError : Error {
    using Error::Error;
};

/// The fairness family is undefined at the requested tax base.
struct SingularTaxBaseError : Error {
    using Error::Error;
};

/// A caller broke a documented precondition.
struct ContractViolation : Error {
    using Error::Error;
};

}  // namespace elastirank
