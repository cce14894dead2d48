#pragma once

#include <stdexcept>
#include <string>

namespace egfl {

/// Error categories; they map one-to-one onto the C API status codes and
/// the CLI exit codes.
enum class Errc {
    check_failed = 1,      // a requested verification did not pass
    invalid_argument = 2,  // bad parameters or malformed config
    divergence = 3,        // simulation state left the admissible region
    numeric = 4,           // internal numerical failure (root finding, quadrature, ...)
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace egfl
