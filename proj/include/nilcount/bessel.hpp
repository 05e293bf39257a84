#pragma once

namespace nilcount {

// J_nu(r) for nu >= -3/2, r >= 0.
double bessel_j(double nu, double r);

// J_nu(z) / z^nu, entire in z; equals 1 / (2^nu Gamma(nu + 1)) at z = 0.
double bessel_lambda(double nu, double z);

}  // namespace nilcount
