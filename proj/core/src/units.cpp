#include "radpair/units.hpp"

#include <cmath>
#include <numbers>

namespace radpair::units {

double gamma_rad_per_s_per_gauss() { return 2.0 * std::numbers::pi * gamma_over_2pi_hz_per_gauss; }

double angular_frequency_to_gauss(double omega_rad_per_s) { return omega_rad_per_s / gamma_rad_per_s_per_gauss(); }

double gauss_to_angular_frequency(double gauss) { return gauss * gamma_rad_per_s_per_gauss(); }

double gauss_to_picotesla(double gauss) { return gauss * 1e-4 * 1e12; }

double microtesla_to_gauss(double microtesla) { return microtesla * 1e-2; }

double exchange_at_distance(double J0, double beta_per_nm, double r_nm) { return J0 * std::exp(-beta_per_nm * r_nm); }

}  // namespace radpair::units
