#ifndef MAGSYM_ERRORS_HPP
#define MAGSYM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace magsym {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedNode : Error {
    explicit UnsupportedNode(const std::string& what) : Error(what) {}
};

struct CyclicBinding : Error {
    explicit CyclicBinding(const std::string& what) : Error(what) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& what) : Error(what) {}
};

struct MissingBinding : Error {
    explicit MissingBinding(const std::string& what) : Error(what) {}
};

struct NotConvertible : Error {
    explicit NotConvertible(const std::string& what) : Error(what) {}
};

struct UnknownSystem : Error {
    explicit UnknownSystem(const std::string& what) : Error(what) {}
};

struct SamplingExhausted : Error {
    explicit SamplingExhausted(const std::string& what) : Error(what) {}
};

struct ReplayMismatch : Error {
    explicit ReplayMismatch(const std::string& what) : Error(what) {}
};

struct ClosureFailure : Error {
    explicit ClosureFailure(const std::string& what) : Error(what) {}
};

struct StepFailure : Error {
    explicit StepFailure(const std::string& what) : Error(what) {}
};

} // namespace magsym

#endif
