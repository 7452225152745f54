"""Matrix functions f(A)b by contour quadrature over the bands.

The resolvent at each trapezoid node on circles enclosing the bands is
expanded in the orthonormal polynomials; summing the expansions gives f(A)b
with one matrix-vector product per degree. Entire functions converge
superexponentially; functions with singularities converge geometrically at
the rate set by the level curve of the Green's function through the nearest
singularity (the multi-interval Bernstein ellipse).
"""

import math

import numpy as np

from akhiezer import (
    BandSystem,
    ClosedFormSource,
    build_greens,
    dense_eig,
    gen_perturbed,
    matfun_apply,
    matfun_pole_residue,
    nu,
    quadrature_circles,
)

bands = BandSystem.from_endpoints([-2, -0.5, 0.5, 6])
A, lam = gen_perturbed(200, bands, 0.0, seed=3)
b = np.random.default_rng(17).standard_normal(200)

w, V = dense_eig(A.to_dense(), vectors=True)
src = ClosedFormSource(bands)
ev = build_greens(bands)


def run(f, name, k_max, exclude=()):
    quad = quadrature_circles(bands, 1000, exclude=exclude)
    exact = V @ (f(w) * (V.T @ b))
    errs = []
    matfun_apply(
        f, A, b, bands, quad, src, k_max=k_max, tol=1e-14,
        callback=lambda k, out: errs.append(
            np.linalg.norm(out.real - exact) / np.linalg.norm(exact)
        ),
    )
    print(f"\nf = {name}: error vs dense eigendecomposition")
    for k in range(0, len(errs), max(1, len(errs) // 10)):
        print(f"  k={k:3d}  {errs[k]:.3e}")
    return np.array(errs)


run(np.exp, "exp (entire: superexponential start)", 30)

errs = run(np.tanh, "tanh (poles at +-i pi/2)", 90)
print(f"  expected rate e^nu(i pi/2; A) = {math.exp(nu(ev, 1j * math.pi / 2, lam)):.4f}")

errs = run(lambda z: np.exp(z) / z, "exp(x)/x (pole at the origin)", 200,
           exclude=[0.0])
print(f"  expected rate e^nu(0; A) = {math.exp(nu(ev, 0.0, lam)):.4f}")

# the same pole structure supplied directly as a pole-residue list
y, rep = matfun_pole_residue(
    [(2.0j, 1.0)], A, b, bands, src, k_max=400, tol=1e-10
)
print(f"\nsingle resolvent via pole-residue form: {rep.iterations} iterations,"
      f" converged={rep.converged}")
