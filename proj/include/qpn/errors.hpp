// errors.hpp — exception taxonomy shared across the library
//
// validation_error: bad user input (configs, tables, CLI args)   -> exit 1
// numerical_error:  solver/integrator failure                    -> exit 2
// io_error:         file system / parse trouble                  -> exit 3

#pragma once

#include <stdexcept>
#include <string>

namespace qpn {

struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Residue formula breaks down when eigenvalues collide; callers fall back to ODE.
struct degenerate_spectrum_error : numerical_error {
    explicit degenerate_spectrum_error(const std::string& msg) : numerical_error(msg) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qpn
