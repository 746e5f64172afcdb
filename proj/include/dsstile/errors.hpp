#pragma once

#include <stdexcept>
#include <string>

namespace dss {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Precondition / argument violations (bad geometry, invalid config values, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Dataset and file ingestion problems; message names the offending record.
class LoadError : public Error {
public:
    explicit LoadError(const std::string& msg) : Error(msg) {}
};

// External detector wire-protocol violations; message carries the payload.
class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& msg) : Error(msg) {}
};

// Detector process/adapter failures (crash, timeout, nonzero exit).
class AdapterError : public Error {
public:
    explicit AdapterError(const std::string& msg) : Error(msg) {}
};

} // namespace dss
