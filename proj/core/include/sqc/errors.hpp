#pragma once

#include <stdexcept>
#include <string>

namespace sqc {

// Invalid circuit parameters or malformed configuration input.
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// A physically meaningful failure: the requested quantity does not exist
// for the given circuit (no idle point, ambiguous state labels, ...).
class physics_error : public std::runtime_error {
public:
    explicit physics_error(const std::string& what) : std::runtime_error(what) {}
};

class no_idle_point : public physics_error {
public:
    explicit no_idle_point(const std::string& what) : physics_error(what) {}
};

class labeling_error : public physics_error {
public:
    explicit labeling_error(const std::string& what) : physics_error(what) {}
};

class resonance_error : public physics_error {
public:
    explicit resonance_error(const std::string& what) : physics_error(what) {}
};

class infeasible_gate : public physics_error {
public:
    explicit infeasible_gate(const std::string& what) : physics_error(what) {}
};

// Numerical failure: eigensolver non-convergence, integration accuracy loss,
// dimension overflow.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sqc
