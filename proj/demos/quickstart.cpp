// Non-Gaussianity of a few textbook states.

#include "nongauss/nongauss.hpp"

#include <cstdio>

int main() {
  using namespace nongauss;

  const FockState one = make_fock(1);
  const FockState cat = make_cat(1.0, 0.3);
  const FockState bell = make_bell_like(BellKind::psi, 0.25 * std::numbers::pi);
  const FockState squeezed = make_squeezed_vacuum(0.5);

  std::printf("%-22s %12s %12s\n", "state", "delta", "purity");
  for (const auto& [name, rho] : {std::pair<const char*, const FockState&>{"|1>", one},
                                  {"cat alpha=1 phi=0.3", cat},
                                  {"Psi+ Bell state", bell},
                                  {"squeezed vacuum r=0.5", squeezed}}) {
    const auto r = non_gaussianity(rho);
    std::printf("%-22s %12.9f %12.9f\n", name, r.delta, r.purity_rho);
  }

  // Closed form for Fock states and its slow approach to 1/2.
  for (int p : {1, 10, 100, 10000}) std::printf("delta[|%d>] = %.9f\n", p, delta_fock_analytic(p));

  // The reference Gaussian of a cat state and the free-mean variant.
  const auto ref = reference_gaussian(cat);
  const auto dp = delta_prime(cat);
  std::printf("cat: reference thermal occupation %.6f, squeezing %.6f\n", ref.spec.thermal(0), ref.spec.squeeze(0));
  std::printf("cat: delta = %.6f, delta' = %.6f at C = %.6f%+.6fi\n", dp.delta, dp.delta_prime, dp.c.real(),
              dp.c.imag());
  return 0;
}
