#pragma once

namespace renyi {

// ln Gamma(x) for x > 0 (Lanczos, g = 7).
double log_gamma(double x);

double log_beta(double a, double b);

// Nagy's W(u,v) = Gamma(1+u+v)/(Gamma(1+u)Gamma(1+v)) (u/(u+v))^u (v/(u+v))^v, with W = 1 on the axes.
double nagy_w(double u, double v);

// Gamma(x+1)/Gamma(x+s) - (x+s/2)^(1-s); strictly positive for x > 0, 0 < s < 1.
double gamma_ratio_gap_check(double x, double s);

} // namespace renyi
