// Loss erodes the non-Gaussianity of Fock states; photon subtraction creates it.

#include "nongauss/nongauss.hpp"

#include <cstdio>

int main() {
  using namespace nongauss;

  std::printf("loss channel, input |p>\n%6s", "eta");
  for (int p : {1, 3, 10}) std::printf("  delta(p=%-2d)", p);
  std::printf("\n");
  for (double eta = 1.0; eta > -1e-9; eta -= 0.25) {
    std::printf("%6.2f", eta);
    for (int p : {1, 3, 10}) std::printf("  %11.6f", non_gaussianity(loss_apply(make_fock(p), eta)).delta);
    std::printf("\n");
  }

  std::printf("\nphoton subtraction from S(0.5)|0>, efficiency 0.8\n%6s  %11s  %11s\n", "T", "delta",
              "P(click)");
  for (double t = 0.1; t < 1.0; t += 0.2) {
    const auto out = ips_state(0.5, t, 0.8);
    std::printf("%6.2f  %11.6f  %11.6f\n", t, non_gaussianity(out.state).delta, out.probability);
  }

  SearchBox box;
  box.r_min = 0.1;
  box.grid = 4;
  const auto m = map_non_gaussianity(ChannelParams::ips(0.9, 0.9), box);
  std::printf("\nIPS(T=0.9, eps=0.9): delta >= %.6f, reached at alpha=%.3f r=%.3f n_t=%.3f\n", m.delta, m.alpha, m.r,
              m.n_t);
  return 0;
}
