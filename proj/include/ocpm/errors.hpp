#pragma once

#include <stdexcept>
#include <string>

namespace ocpm {

/// Base class for all domain errors raised by the library. The message always
/// names the offending identifier (eid, oid, type, activity, ...) when there
/// is one.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input text/bytes do not conform to the expected layout (JSON shape, CSV
/// header, timestamp format, unsupported attribute value type).
class MalformedInput : public Error {
public:
    using Error::Error;
};

/// A structurally parseable log violates a log invariant: dangling object
/// reference, duplicate eid/oid, event without any object reference.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// An operation was asked about an object type the log does not declare.
class UnknownType : public Error {
public:
    using Error::Error;
};

/// A compliance rule references an activity absent from the log vocabulary.
class UnknownActivity : public Error {
public:
    using Error::Error;
};

/// Strict-mode statistics: an object lacks the grouping attribute.
class MissingAttribute : public Error {
public:
    using Error::Error;
};

/// Generator configuration fails validation.
class InvalidConfig : public Error {
public:
    using Error::Error;
};

} // namespace ocpm
