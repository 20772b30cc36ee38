#ifndef OAM_ERRORS_HPP
#define OAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace oam
{
// Invalid user-supplied configuration (bad ranges, malformed schedules, unknown keys).
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Site index outside the lattice.
class IndexError : public std::out_of_range
{
public:
    using std::out_of_range::out_of_range;
};

// A frequency that lies outside the band where a band quantity is requested.
class BandEdgeError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Integration or linear-solve failure. `suggestion` carries a usable remedy
// (a smaller dt, a larger lattice) when one is known.
class NumericalError : public std::runtime_error
{
public:
    NumericalError(const std::string &what, std::string suggestion = {})
        : std::runtime_error(what), suggestion_(std::move(suggestion))
    {
    }

    const std::string &suggestion() const noexcept { return suggestion_; }

private:
    std::string suggestion_;
};

// A response curve with no stopband to measure.
class NoStopbandError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

} // namespace oam

#endif // OAM_ERRORS_HPP
