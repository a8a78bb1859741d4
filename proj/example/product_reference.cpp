// With a product reference the bound collapses to plain superadditivity.

#include <cstdio>

#include "entrolab/statesgen.hpp"
#include "entrolab/verify.hpp"

int main() {
  using namespace entrolab;
  const BipartiteDims dims{2, 3};
  const auto rho = ginibre_full_rank(6, 11);
  const auto sigma = tensor(ginibre_full_rank(2, 12), ginibre_full_rank(3, 13));
  const auto b = run_breakdown(rho, sigma, dims);
  std::printf("||H|| = %.3e  ||L|| = %.3e  alpha = %.15f\n", b.h_norm, b.l_norm, b.alpha);
  std::printf("Ent(AB) = %.12f >= Ent(A) + Ent(B) = %.12f\n", b.d_full, b.d_a + b.d_b);
  return b.all_pass() ? 0 : 1;
}
