#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radpair/control.hpp"
#include "radpair/hamiltonian.hpp"
#include "radpair/yields.hpp"

namespace radpair {

// Shortest round-trip formatting, identical on every run.
std::string format_number(double x);

std::string fnv1a_hex(const std::string& text);

// Keys: B, donor_tensors, acceptor_tensors, J, gamma_n.  A tensor is {"Ax","Ay","Az"},
// [Ax, Ay, Az], or a 3x3 matrix that must be diagonal.
HamiltonianSpec hamiltonian_spec_from_json(const std::string& text);
std::string to_json(const HamiltonianSpec& spec);

// Missing keys keep their defaults; unknown keys are rejected.
ControlConfig control_config_from_json(const std::string& text);
std::string to_json(const ControlConfig& config);

// Header comment lines start with '#'.  Columns: A, B, inv_deltaB.
std::string grid_to_csv(const SensitivityGrid& grid, const std::vector<std::string>& comments);
std::string grid_to_json(const SensitivityGrid& grid, const std::vector<std::string>& comments);

}  // namespace radpair
