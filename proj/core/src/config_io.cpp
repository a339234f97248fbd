#include "sqc/config_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "sqc/errors.hpp"

namespace sqc {

namespace {

using nlohmann::json;

double require_number(const json& node, const char* key, const std::string& context) {
    if (!node.contains(key))
        throw parameter_error("config error in " + context + ": missing key '" + key + "'");
    const auto& v = node.at(key);
    if (!v.is_number())
        throw parameter_error("config error in " + context + ": key '" + key +
                              "' must be a number");
    return v.get<double>();
}

CircuitParams parse_circuit(const json& node) {
    CircuitParams p;
    p.ej1 = require_number(node, "EJ1_GHz", "circuit");
    p.ej2 = require_number(node, "EJ2_GHz", "circuit");
    p.c1 = require_number(node, "C1_fF", "circuit");
    p.c2 = require_number(node, "C2_fF", "circuit");
    p.ejc1 = require_number(node, "EJC1_GHz", "circuit");
    p.ejc2 = require_number(node, "EJC2_GHz", "circuit");
    p.cc1 = require_number(node, "CC1_fF", "circuit");
    p.cc2 = require_number(node, "CC2_fF", "circuit");
    p.validate();
    return p;
}

ChainParams parse_chain(const json& node) {
    ChainParams c;
    const char* ej_keys[3] = {"EJ1_GHz", "EJ2_GHz", "EJ3_GHz"};
    const char* c_keys[3] = {"C1_fF", "C2_fF", "C3_fF"};
    for (int i = 0; i < 3; ++i) {
        c.ej[i] = require_number(node, ej_keys[i], "chain");
        c.c[i] = require_number(node, c_keys[i], "chain");
    }
    c.ejc12_1 = require_number(node, "EJC12_1_GHz", "chain");
    c.ejc12_2 = require_number(node, "EJC12_2_GHz", "chain");
    c.cc12_1 = require_number(node, "CC12_1_fF", "chain");
    c.cc12_2 = require_number(node, "CC12_2_fF", "chain");
    c.ejc23_1 = require_number(node, "EJC23_1_GHz", "chain");
    c.ejc23_2 = require_number(node, "EJC23_2_GHz", "chain");
    c.cc23_1 = require_number(node, "CC23_1_fF", "chain");
    c.cc23_2 = require_number(node, "CC23_2_fF", "chain");
    c.validate();
    return c;
}

} // namespace

CircuitConfig load_circuit_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw parameter_error("config parse error in " + path + ": " + err.what());
    }
    if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer())
        throw parameter_error("config error: integer schema_version field is required");

    CircuitConfig config;
    config.schema_version = doc.at("schema_version").get<int>();
    if (config.schema_version != 1)
        throw parameter_error("config error: unsupported schema_version");
    if (!doc.contains("circuit"))
        throw parameter_error("config error: missing 'circuit' section");
    config.circuit = parse_circuit(doc.at("circuit"));

    if (doc.contains("chain")) config.chain = parse_chain(doc.at("chain"));
    if (doc.contains("spectator")) {
        SpectatorParams sp;
        sp.base = config.circuit;
        const auto& node = doc.at("spectator");
        sp.ejs = require_number(node, "EJS_GHz", "spectator");
        sp.cs = require_number(node, "CS_fF", "spectator");
        sp.c_para = require_number(node, "C_para_aF", "spectator");
        sp.validate();
        config.spectator = sp;
    }
    return config;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
    std::size_t columns = 0;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw parameter_error("cannot open output file: " + path);
    }
    impl_->columns = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        impl_->out << (i ? "," : "") << header[i];
    impl_->out << "\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != impl_->columns)
        throw parameter_error("csv row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i)
        impl_->out << (i ? "," : "") << format_double(values[i]);
    impl_->out << "\n";
}

} // namespace sqc
