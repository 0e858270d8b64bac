#pragma once

#include <stdexcept>
#include <string>

namespace bohmsemi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A wave function (or a slice of one) whose L2 norm vanished.
class ZeroNorm : public Error {
public:
    using Error::Error;
};

/// A propagation step produced non-finite amplitudes.
class UnstableState : public Error {
public:
    using Error::Error;
};

/// A configuration point fell outside the grid.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// Trajectory integration requested a time not covered by the stored frames.
class FrameGap : public Error {
public:
    using Error::Error;
};

/// Evaluation of a guidance velocity at (or numerically at) a node of the wave function.
class NodePoint : public Error {
public:
    using Error::Error;
};

/// Grids, potentials and wave functions that do not fit together, or invalid parameters.
class ShapeError : public Error {
public:
    using Error::Error;
};

}  // namespace bohmsemi
