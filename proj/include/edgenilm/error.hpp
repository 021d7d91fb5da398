#pragma once

#include <stdexcept>
#include <string>

namespace edgenilm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad sampling setup, unknown appliance id, malformed JSON.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input outside the domain of an operation (empty series, bad label index).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Power triangle violated beyond rounding tolerance.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// Not enough cycles around an event to cut the pre/post window.
class WindowError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Non-finite value while assembling a feature vector.
class FeatureError : public Error {
public:
    using Error::Error;
};

class InferenceError : public Error {
public:
    using Error::Error;
};

/// Loss became NaN/Inf during training.
class TrainingError : public Error {
public:
    using Error::Error;
};

class StratificationError : public Error {
public:
    using Error::Error;
};

/// Wraps an error raised inside run_pipeline with the stage that raised it.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace edgenilm
