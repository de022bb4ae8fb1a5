#pragma once

#include <stdexcept>
#include <string>

namespace gaas {

/** Base class for every error the engine raises deliberately. */
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ── policy documents ──
struct ParseError : Error {        // malformed JSON, carries byte offset in message
    using Error::Error;
};
struct SchemaError : Error {       // structurally valid JSON, invalid rule document
    using Error::Error;
};
struct CompileError : Error {      // compile invoked on a set with validation findings
    using Error::Error;
};

// ── evaluation ──
struct ContextMissing : Error {    // predicate referenced a field the context lacks
    using Error::Error;
};
struct InsufficientData : Error {  // e.g. RSI asked for more closes than supplied
    using Error::Error;
};

// ── trust ──
struct EmptyHistory : Error {      // main-text trust factor is undefined at N = 0
    using Error::Error;
};
struct IndexBeyondHorizon : Error {
    using Error::Error;
};

// ── audit ──
struct FormatError : Error {       // malformed audit CSV row, carries line number
    using Error::Error;
};
struct StorageError : Error {
    using Error::Error;
};
struct BrokenChain : Error {       // trust continuity violated between records
    using Error::Error;
};

// ── gateway ──
struct UnknownDomain : Error {
    using Error::Error;
};
struct ValidationFailed : Error {  // submission rejected before evaluation
    using Error::Error;
};
struct Unavailable : Error {       // no active policy for the domain
    using Error::Error;
};
struct UnknownTicket : Error {
    using Error::Error;
};
struct AlreadyResolved : Error {
    using Error::Error;
};

// ── simulation ──
struct NonMonotonicDates : Error {
    using Error::Error;
};
struct InsufficientCash : Error {  // execution asked to fill an unfillable order
    using Error::Error;
};

// ── metrics ──
struct RunMismatch : Error {       // audit and ledger come from different runs
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace gaas
