#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <numbers>
#include <stdexcept>
#include <string>

namespace rtba {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kAstronomicalUnit = 1.495978707e11;  // m, IAU 2012
inline constexpr double kSunMu = 1.32712440018e20;           // m^3/s^2
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kJ2000Mjd = 51544.5;

// Non-evaluable trajectories are scored with this instead of throwing.
inline constexpr double kInfeasibleDeltaV = 1e9;

// Smallest admissible heliocentric distance along a shaped leg.
inline constexpr double kMinLegRadius = 0.05 * kAstronomicalUnit;

inline double mjd_to_seconds(double mjd) { return mjd * kSecondsPerDay; }
inline double days_to_seconds(double days) { return days * kSecondsPerDay; }

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed or produced non-finite output.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A frame could not be built (parallel or zero vectors).
class FrameError : public Error {
public:
    using Error::Error;
};

/// A singular or unsolvable shaping boundary-value problem.
class ShapingError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace rtba
