#pragma once

namespace ctk {

// Gamma function. Integers and half-integers take exact closed forms;
// everything else goes through the C library.
double gamma_fn(double x);

// Gamma(x) / Gamma(y), stable for large arguments.
double gamma_ratio(double x, double y);

}  // namespace ctk
