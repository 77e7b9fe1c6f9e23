#pragma once

#include <stdexcept>
#include <string>

namespace smoc {

// Base for every recoverable error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownSwitchError : Error {
    explicit UnknownSwitchError(const std::string& id)
        : Error("unknown switch: " + id) {}
};

struct NoPathError : Error {
    NoPathError(const std::string& s1, const std::string& s2)
        : Error("no path between " + s1 + " and " + s2) {}
};

// Topology invariant violated at build time (disconnected graph,
// duplicate link, host on a missing switch, ...).
struct TopologyError : Error {
    using Error::Error;
};

struct UnknownHostError : Error {
    explicit UnknownHostError(const std::string& what)
        : Error("unknown host: " + what) {}
};

struct HostNotOnPathError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Parse failure in a line-oriented input file. Carries the 1-based line
// number so the CLI can report it and exit 2.
struct ParseError : Error {
    int line;
    std::string detail;
    ParseError(int line_number, const std::string& message)
        : Error("line " + std::to_string(line_number) + ": " + message),
          line(line_number),
          detail(message) {}
};

}  // namespace smoc
