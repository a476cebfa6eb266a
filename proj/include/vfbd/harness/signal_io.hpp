#pragma once

#include <string>
#include <vector>

#include "vfbd/errors.hpp"
#include "vfbd/model/signal_log.hpp"

namespace vfbd::harness {

/// Column names of the signal CSV, in the order they are written.
const std::vector<std::string>& signal_columns();

/// Base of all malformed-log failures.
class SignalLogError : public IoError {
public:
    using IoError::IoError;
};

/// Missing, duplicated or unknown column; `column` names it.
class SchemaError : public SignalLogError {
public:
    SchemaError(const std::string& what, std::string col) : SignalLogError(what), column(std::move(col)) {}
    std::string column;
};

class NonUniformGridError : public SignalLogError {
public:
    using SignalLogError::SignalLogError;
};

/// NaN, infinite or unparsable entry.
class MissingValueError : public SignalLogError {
public:
    using SignalLogError::SignalLogError;
};

/// Reads a signal CSV. Columns may appear in any order; every column of
/// signal_columns() must be present exactly once and no other column is allowed.
/// expected_dt > 0 additionally pins the spacing.
model::SignalLog load_signal_log(const std::string& path, double expected_dt = 0.0);

/// Shortest round-trip decimal representation, so load(write(x)) == x bit for bit.
void write_signal_log(const std::string& path, const model::SignalLog& log);

/// Time stamps strictly increasing with constant spacing (relative tolerance 1e-9).
void check_uniform_grid(const model::SignalLog& log, double expected_dt = 0.0);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

} // namespace vfbd::harness
