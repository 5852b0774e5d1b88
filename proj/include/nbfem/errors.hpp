#pragma once

#include <stdexcept>
#include <string>

namespace nbfem {

// Base class for all library errors. Subclasses map onto the CLI exit-code
// contract: config 2, resource 3, solver 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ResourceLimit : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

// Point lies outside the admissible tubular neighborhood of the surface.
class OutsideBand : public Error {
public:
    using Error::Error;
};

// I - phi*H became numerically singular; unreachable for admissible bands.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

class EmptyBand : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DegenerateCut : public Error {
public:
    using Error::Error;
};

class UnsupportedDegree : public Error {
public:
    using Error::Error;
};

class NoIntersection : public Error {
public:
    using Error::Error;
};

class Unsupported : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class PointOutsideCell : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class BreakdownNonSPD : public SolverError {
public:
    using SolverError::SolverError;
};

class NotConverged : public SolverError {
public:
    using SolverError::SolverError;
};

class NonPositiveError : public Error {
public:
    using Error::Error;
};

class NoTraceCells : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace nbfem
