#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqc/circuit.hpp"

namespace sqc {

// Parsed circuit configuration file. The file is JSON with a mandatory
// schema_version field and a "circuit" section; "chain" and "spectator"
// sections are present only for the experiments that need them.
struct CircuitConfig {
    int schema_version = 1;
    CircuitParams circuit;
    std::optional<ChainParams> chain;
    std::optional<SpectatorParams> spectator;
};

// Loads and validates a configuration file. Throws parameter_error with a
// location-annotated message on malformed input.
CircuitConfig load_circuit_config(const std::string& path);

// Deterministic CSV writer: '.' decimal separator, no locale, floats printed
// with 17 significant digits.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);

private:
    struct Impl;
    Impl* impl_;
};

std::string format_double(double value);

} // namespace sqc
