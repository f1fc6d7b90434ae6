"""The directed-path model behind the walk, and its exactly solvable
moments.

Reading the walk backwards in time turns transition probabilities into
partition functions of paths with Beta-distributed edge weights: for
each fixed endpoint the two laws coincide (verified exhaustively below).
For Beta weights the disorder-averaged moments admit nested contour
integrals; under diffusive rescaling they converge to the moments of
the multiplicative-noise limit field.
"""

from kpzlab import (
    beta_moment_closed_form_k1,
    beta_moment_contour,
    beta_moment_oracle,
    moment_convergence_table,
    she_moment_closed_form_k1,
    time_reversal_law_check,
)

print("equality in law of partition value and reversed walk probability")
for n in (1, 2, 3, 4):
    print(f"  N={n}: exhaustive two-point check -> {time_reversal_law_check(n)}")

print("\nfirst moment by contour integral vs path counting, T=12, n=4:")
cf = beta_moment_closed_form_k1(12, 4, 2.0, 2.0)
res = beta_moment_contour(12, [4], 2.0, 2.0)
print(f"  contour {res.value:.12e}   closed form {cf:.12e}")

print("\nsecond moment vs exhaustive path-pair enumeration, T=8:")
orc = beta_moment_oracle(8, [5, 3], 1.0, 1.0)
res = beta_moment_contour(8, [5, 3], 1.0, 1.0)
print(f"  contour {res.value:.12e}   oracle {orc:.12e}")

print("\nrescaled first moment against the limit-field moment:")
print(f"  limit: {she_moment_closed_form_k1(1.0, 0.0, 0.25):.6f}")
for row in moment_convergence_table(0.25, 1.0, [0.0], 1, [0.2, 0.1, 0.05]):
    print(f"  eps={row['epsilon']:<5g} rescaled={row['rescaled_beta_moment']:.6f} "
          f"ratio={row['ratio']:.4f}")
