#!/usr/bin/env python3
"""Walk through the three densities of a minimal-length state.

A state is specified by its auxiliary-space amplitude phi(q) on the compact
interval (-q0, q0).  The position density w(x) comes from the Fourier pair,
and the physical wavenumber density u(k) is the pushforward of v(q) through
k = tan(sqrt(beta) q)/sqrt(beta).  The flat box state is the cleanest example
because everything has a closed form: w is a squared sinc and u is the
standard Cauchy density.
"""

import math

import numpy as np

import gupcert as g


def main():
    params = g.make_params(1.0)
    print(f"beta = 1  ->  q0 = pi/2 = {params.q0:.10f}")
    print()

    state = g.catalog_state("uniform_q", params)
    rep = g.bundle(state)

    print("flat state on (-pi/2, pi/2):")
    print(f"  amplitude                 {np.abs(state.amplitudes[0]):.10f}"
          f"   (1/sqrt(pi) = {1/math.sqrt(math.pi):.10f})")

    mid = len(rep.w_x.grid) // 2
    print(f"  |psi(0)|^2                {rep.w_x.values[mid]:.10f}"
          f"   (q0/pi = {params.q0/math.pi:.10f})")

    k = rep.u_k.grid.nodes
    cauchy = 1.0 / (math.pi * (1.0 + k * k))
    print(f"  max |u - Cauchy| at nodes {np.max(np.abs(rep.u_k.values - cauchy)):.3e}")
    print()

    print("normalization (quadrature + modeled tail):")
    for label, dens in (("v(q)", rep.v_q), ("w(x)", rep.w_x), ("u(k)", rep.u_k)):
        total = dens.grid.integrate(dens.values) + dens.tail_mass_bound
        print(f"  {label}: {total:.12f}")
    print()

    print("the pushforward is exact at image nodes:")
    jac = g.jacobian(k, params)
    print(f"  max |u(k)(1+beta k^2) - v(q)| = "
          f"{np.max(np.abs(rep.u_k.values*jac - rep.v_q.values)):.3e}")
    print()

    print("interval probabilities agree between the two momentum pictures:")
    from gupcert.entropy import density_cdf
    for q1, q2 in ((-0.5, 0.5), (0.2, 1.2)):
        k1, k2 = g.k_of_q(np.array([q1, q2]), params)
        mq = np.diff(density_cdf(rep.v_q, np.array([q1, q2])))[0]
        mk = np.diff(density_cdf(rep.u_k, np.array([k1, k2])))[0]
        print(f"  P(q in [{q1:+.1f},{q2:+.1f}]) = {mq:.10f}   "
              f"P(k in [{k1:+.3f},{k2:+.3f}]) = {mk:.10f}")


if __name__ == "__main__":
    main()
