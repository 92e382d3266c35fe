#pragma once

#include <stdexcept>
#include <string>

namespace qrm {

/// Base of every error raised by the library. Callers that only care about
/// "skip this option" vs "abort the run" can catch the two intermediate
/// classes below instead of the concrete types.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-record problems: the pipeline counts these and moves on.
class RecoverableError : public Error {
public:
    using Error::Error;
};

/// Bad configuration or arguments; the CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

#define QRM_DEFINE_ERROR(Name, Base)          \
    class Name : public Base {                \
    public:                                   \
        using Base::Base;                     \
    }

QRM_DEFINE_ERROR(InvalidQuote, RecoverableError);
QRM_DEFINE_ERROR(InconsistentSeries, RecoverableError);
QRM_DEFINE_ERROR(InvalidBoundary, RecoverableError);
QRM_DEFINE_ERROR(NonFiniteValue, RecoverableError);
QRM_DEFINE_ERROR(MissingDay, RecoverableError);

QRM_DEFINE_ERROR(DomainError, Error);
QRM_DEFINE_ERROR(RangeError, Error);
QRM_DEFINE_ERROR(ResolutionError, Error);
QRM_DEFINE_ERROR(EmptyInput, Error);
QRM_DEFINE_ERROR(EmptyBatch, Error);
QRM_DEFINE_ERROR(DivergenceDetected, Error);
QRM_DEFINE_ERROR(EmptyDataset, Error);
QRM_DEFINE_ERROR(IoError, Error);

#undef QRM_DEFINE_ERROR

}  // namespace qrm
