#ifndef RABISIM_ERRORS_HPP
#define RABISIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rabi {

// Bad inputs: parameter constraints, config schema, malformed data files.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerics: step-size underflow, quadrature non-convergence, singular fits.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested a closed-form transform that does not exist for the model.
class unsupported_transform : public std::runtime_error {
public:
    explicit unsupported_transform(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rabi

#endif
