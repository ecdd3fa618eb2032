// Builds the builtin breather for both signs and prints the orbit label
// c(r), the envelope of psi and the monochromatic amplitude along a ray.

#include <cstdio>

#include "curlwave/breather.hpp"

using namespace curlwave;

int main() {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto prof = builtin_profile(Exponent(3), s, {});
    const Breather b(prof);
    std::printf("%s, p = 3, T = %.6f\n", to_string(s).c_str(), b.T());
    std::printf("%6s %14s %14s %14s %14s\n", "r", "2pi - g", "c(r)", "max|psi|", "phi(r)");
    for (double r : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
      std::printf("%6.2f %14.6e %14.6e %14.6e %14.6e\n", r, prof.defect(r), b.c(r),
                  b.psi_max(r, 128), complex_breather(prof, r));
    }
    std::printf("\n");
  }
  return 0;
}
