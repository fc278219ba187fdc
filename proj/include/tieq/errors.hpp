#pragma once

#include <stdexcept>
#include <string>

namespace tieq {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateBox : public Error { public: using Error::Error; };
class GridTooLarge : public Error { public: using Error::Error; };
class NoFiniteHorizon : public Error { public: using Error::Error; };
class NotNormalized : public Error { public: using Error::Error; };
class NegativeDensity : public Error { public: using Error::Error; };
class NonpositiveLambda : public Error { public: using Error::Error; };
class ModeMismatch : public Error { public: using Error::Error; };
class InvalidGenerator : public Error { public: using Error::Error; };
class StepTooLarge : public Error { public: using Error::Error; };
class ScanTooLarge : public Error { public: using Error::Error; };
class StructureMismatch : public Error { public: using Error::Error; };
class NotExponential : public Error { public: using Error::Error; };
class AllStagesDiverged : public Error { public: using Error::Error; };
class Precondition : public Error { public: using Error::Error; };

// Configuration / input-file problems carry a JSON pointer to the offending spot.
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, const std::string& message)
        : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

} // namespace tieq
