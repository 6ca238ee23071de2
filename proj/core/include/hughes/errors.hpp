#ifndef HUGHES_ERRORS_HPP
#define HUGHES_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hughes {

/// Raised when a bracketed root search cannot find a sign change. Carries the
/// sampled residual pairs (argument, residual) so the failure can be inspected.
class bracket_error : public std::runtime_error {
public:
    bracket_error(const std::string& what, std::vector<std::pair<double, double>> samples)
        : std::runtime_error(what), samples_(std::move(samples)) {}

    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

private:
    std::vector<std::pair<double, double>> samples_;
};

/// Raised when a scheme detects that one of its structural invariants broke
/// (e.g. particle ordering). The message includes a state dump.
class invariant_error : public std::runtime_error {
public:
    explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hughes

#endif
