"""Toy model: two three-level atoms with a collective coupling V_c.

The closed-form dressed Hamiltonian is compared with exact elimination of the excited
states, together with the large-detuning figure of merit.
"""

from rbcphase.threelevel import ThreeLevelParams, compare_routes

print(f"{'vc':>6} {'gamma_c':>7} {'max dev':>9} {'k exact':>9} {'k closed':>9} {'k large-D':>9}")
for gamma_c in (0.0, 1.0):
    for vc in (0.1, 1.0, 10.0):
        r = compare_routes(ThreeLevelParams(omega01=100, delta=1e4, gamma_c=gamma_c, vc=vc))
        print(f"{vc:6.1f} {gamma_c:7.1f} {r['max_relative_deviation']:9.2e} {r['kappa_exact']:9.4f} "
              f"{r['kappa_closed_form']:9.4f} {r['kappa_asymptotic']:9.4f}")
print("element deviation grows linearly in vc; with gamma_c = Gamma the large-detuning kappa tracks the exact one")
