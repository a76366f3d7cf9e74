#pragma once

#include <stdexcept>
#include <string>

namespace spmid {

// Every failure raised by the library derives from Error. The CLI maps the
// category onto a process exit code.
enum class ErrorKind {
    Validation,      // bad parameters, malformed data, usage problems
    NonConvergence,  // optimiser or regression could not reach its target
    Io,              // file system failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

// theta -> grouped mapping with a zero denominator
struct DegenerateMapping : Error {
    explicit DegenerateMapping(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct SingularStoichiometry : Error {
    explicit SingularStoichiometry(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct ExtrapolationError : Error {
    explicit ExtrapolationError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct DatasetInconsistency : Error {
    explicit DatasetInconsistency(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

// Evaluation of a transfer function at s = 0.
struct PoleError : Error {
    explicit PoleError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct ResolutionError : Error {
    explicit ResolutionError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct UsageError : Error {
    explicit UsageError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& msg)
        : Error(ErrorKind::Validation,
                file + ":" + std::to_string(line) + ": " + msg),
          file_(file),
          line_(line) {}
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

class RegressionFailure : public Error {
public:
    RegressionFailure(const std::string& w, double best_r2)
        : Error(ErrorKind::NonConvergence, w), best_r2_(best_r2) {}
    double best_r_squared() const noexcept { return best_r2_; }

private:
    double best_r2_;
};

struct NonConvergence : Error {
    explicit NonConvergence(const std::string& w) : Error(ErrorKind::NonConvergence, w) {}
};

// Time stepping produced NaN/Inf.
struct StepRejected : Error {
    explicit StepRejected(const std::string& w) : Error(ErrorKind::NonConvergence, w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};

}  // namespace spmid
