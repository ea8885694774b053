#ifndef ARCCONF_ERRORS_HPP
#define ARCCONF_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace arcconf {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid inputs: bad datasets, mismatched orderings, malformed files.
// Collects every violation found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
    ValidationError(const std::string& context, const std::vector<std::string>& violations)
        : Error(join(context, violations)), violations_(violations) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::string& context, const std::vector<std::string>& v) {
        std::string out = context;
        for (const auto& item : v) {
            out += "\n  - ";
            out += item;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

// A configured capacity bound would be exceeded (parent-configuration space,
// subset enumeration count). Distinct from ValidationError so callers can
// raise the bound instead of fixing the input.
class CapacityError : public Error {
public:
    CapacityError(const std::string& msg, unsigned long long requested, unsigned long long limit)
        : Error(msg + " (requested " + std::to_string(requested) + ", limit " +
                std::to_string(limit) + ")"),
          requested_(requested),
          limit_(limit) {}

    unsigned long long requested() const { return requested_; }
    unsigned long long limit() const { return limit_; }

private:
    unsigned long long requested_;
    unsigned long long limit_;
};

// An iterative numeric routine failed to meet its certificate. Carries the
// best iterate found so the caller can inspect or restart.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> best_point, double grad_norm,
                     int iterations)
        : Error(msg + " (projected-gradient norm " + std::to_string(grad_norm) + " after " +
                std::to_string(iterations) + " iterations)"),
          best_point_(std::move(best_point)),
          grad_norm_(grad_norm),
          iterations_(iterations) {}

    const std::vector<double>& best_point() const { return best_point_; }
    double grad_norm() const { return grad_norm_; }
    int iterations() const { return iterations_; }

private:
    std::vector<double> best_point_;
    double grad_norm_;
    int iterations_;
};

// Evaluation hit a point where a derivative is unbounded (e.g. an impossible
// observation under the current parameters).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace arcconf

#endif  // ARCCONF_ERRORS_HPP
