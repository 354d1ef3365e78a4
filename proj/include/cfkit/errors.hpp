#pragma once

#include <stdexcept>
#include <string>

namespace cfkit {

// Exit-code contract used by the CLI:
//   2 validation / bad arguments, 3 numeric or convergence failure, 4 I/O.
class error : public std::runtime_error {
public:
    error(std::string msg, int exit_code)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// Invalid call arguments, out-of-range parameters, malformed data.
class validation_error : public error {
public:
    explicit validation_error(std::string msg) : error(std::move(msg), 2) {}
};

class invalid_argument_error : public validation_error {
public:
    using validation_error::validation_error;
};

class invalid_parameter_error : public validation_error {
public:
    using validation_error::validation_error;
};

// Parsable file but unusable content (bad line, wrong kind, degenerate data).
class ingestion_error : public validation_error {
public:
    using validation_error::validation_error;
};

class degenerate_data_error : public validation_error {
public:
    using validation_error::validation_error;
};

// Numeric breakdowns: non-finite intermediates, failed iterations.
class numeric_error : public error {
public:
    explicit numeric_error(std::string msg) : error(std::move(msg), 3) {}
};

class numeric_failure_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

class convergence_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

class degenerate_support_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

// Filesystem level failures (missing file, unwritable destination).
class io_error : public error {
public:
    explicit io_error(std::string msg) : error(std::move(msg), 4) {}
};

} // namespace cfkit
