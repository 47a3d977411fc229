#ifndef UNIQODE_ERRORS_HPP
#define UNIQODE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace uniqode {

// Bad user-supplied configuration (shapes, enums, option values).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Array/matrix dimension mismatch.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data violates an operation's precondition (e.g. missing derivatives).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// API misuse that is not a configuration issue (e.g. invalid tape root).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// ODE integration produced a non-finite state.
struct IntegrationBlowupError : std::runtime_error {
    IntegrationBlowupError(const std::string& msg, double t)
        : std::runtime_error(msg), time(t) {}
    double time;
};

// A candidate pair fails the C(x_i) != C(x_j) hypothesis at working precision.
struct DegeneratePairError : std::runtime_error {
    explicit DegeneratePairError(const std::string& msg) : std::runtime_error(msg) {}
};

// |g(y_i)| below threshold where Theorem 1/3 requires g(y_i) != 0.
struct GZeroError : std::runtime_error {
    explicit GZeroError(const std::string& msg) : std::runtime_error(msg) {}
};

// The bound denominator is too small to certify a finite radius.
struct UnboundedCertificateError : std::runtime_error {
    explicit UnboundedCertificateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training loss became non-finite.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, int at_epoch)
        : std::runtime_error(msg), epoch(at_epoch) {}
    int epoch;
};

// No matched pair exists in the dataset at the requested tolerance.
struct NoMatchedPairError : std::runtime_error {
    explicit NoMatchedPairError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace uniqode

#endif
