// Smoothed two-qubit Bell state as the reference sigma_AB: ||H|| and alpha
// approach 3 and 7 as the smoothing weight goes to zero.

#include <cstdio>

#include "entrolab/statesgen.hpp"
#include "entrolab/verify.hpp"

int main() {
  using namespace entrolab;
  const BipartiteDims dims{2, 2};
  const auto bell = pure_state(maximally_entangled_vector(2));
  const auto rho = ginibre_full_rank(4, 7);
  std::printf("%-10s %-22s %-22s %s\n", "eps", "||H||_inf", "alpha", "theorem slack");
  for (double eps : {1e-1, 1e-2, 1e-4, 1e-6}) {
    const auto sigma = smooth(bell, eps);
    const auto b = run_breakdown(rho, sigma, dims);
    std::printf("%-10.0e %-22.15f %-22.15f %.6e\n", eps, b.h_norm, b.alpha, b.theorem().slack);
  }
}
