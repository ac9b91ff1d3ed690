#pragma once

#include <stdexcept>
#include <string>

namespace svp {

// Base for everything thrown by the library. The CLI maps subclasses to
// exit codes, so new error categories should subclass one of these rather
// than throwing std::runtime_error directly.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument values (even kernel size, non-positive grid, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

// Coordinate outside the sampled image.
class OutOfRange : public Error {
public:
    using Error::Error;
};

// Two grids that must share dimensions do not.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

// No centerline available for the requested click / segment id.
class NoVessel : public Error {
public:
    using Error::Error;
};

// Path too short to fit a tangent window.
class DegeneratePath : public Error {
public:
    using Error::Error;
};

// Time series too short for the smoothing window.
class TooShortSeries : public Error {
public:
    using Error::Error;
};

// Fewer than two extrema: no pulsation to measure.
class InsufficientPulsation : public Error {
public:
    using Error::Error;
};

// Vessel moved away from the carry-over point during tracking.
class TrackingLost : public Error {
public:
    TrackingLost(int frame_index, const std::string& why)
        : Error("tracking lost at frame " + std::to_string(frame_index) + ": " + why),
          frame(frame_index) {}
    int frame;
};

// Score denominator was zero; message names the metric.
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

// Width statistics need at least two points.
class TooFewPoints : public Error {
public:
    using Error::Error;
};

// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line_number)
        : Error(msg + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
    int line;
};

// Well-formed input with out-of-contract values; message carries the field path.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Unreadable, unwritable or undecodable file.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace svp
