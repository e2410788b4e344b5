#pragma once

namespace radpair::units {

// Electron gyromagnetic ratio gamma / 2pi in Hz per gauss.
inline constexpr double gamma_over_2pi_hz_per_gauss = 2.8e6;

double gamma_rad_per_s_per_gauss();

// Fields enter the Hamiltonian as angular frequencies omega = gamma * B.
double angular_frequency_to_gauss(double omega_rad_per_s);
double gauss_to_angular_frequency(double gauss);
double gauss_to_picotesla(double gauss);
double microtesla_to_gauss(double microtesla);

// J(r) = J0 exp(-beta r); J0 in the caller's unit, beta in 1/nm, r in nm.
double exchange_at_distance(double J0, double beta_per_nm, double r_nm);

}  // namespace radpair::units
