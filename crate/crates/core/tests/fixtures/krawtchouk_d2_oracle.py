#!/usr/bin/env python3
"""Brute-force values for the Krawtchouk d=2 instance.

Only basis changes are used: eigenvectors come from sympy nullspaces, the
standard basis is built by expanding an A-eigenvector in the A*-eigenbasis,
and every number is read off a change-of-basis matrix. No closed-form
intersection formulas appear here.

Run:  python3 krawtchouk_d2_oracle.py > krawtchouk_d2.json
"""
import json
from sympy import Matrix, Rational, eye, zeros

theta = [0, 1, 2]
theta_star = [0, 1, 2]
varphi = [-4, -4]
phi = [-2, -2]
d = 2
n = d + 1

# Split form: A lower bidiagonal, A* upper bidiagonal.
A = zeros(n, n)
As = zeros(n, n)
for i in range(n):
    A[i, i] = theta[i]
    As[i, i] = theta_star[i]
for i in range(1, n):
    A[i, i - 1] = 1
    As[i - 1, i] = varphi[i - 1]


def eigvec(M, lam):
    ns = (M - lam * eye(n)).nullspace()
    assert len(ns) == 1, "eigenspace must be one-dimensional"
    return ns[0]




# Phi-standard basis: xi in E_0 V (A-eigenvector for theta_0), basis E*_i xi.
xi = eigvec(A, theta[0])
vstar = Matrix.hstack(*[eigvec(As, t) for t in theta_star])
coords = vstar.solve(xi)  # xi = sum coords[i] v*_i, so E*_i xi = coords[i] v*_i
P = Matrix.hstack(*[coords[i] * vstar[:, i] for i in range(n)])
Arep = P.inv() * A * P
Asrep = P.inv() * As * P
assert Asrep == Matrix.diag(*theta_star)

a = [Arep[i, i] for i in range(n)]
b = [Arep[i, i + 1] for i in range(d)]
c = [Arep[i, i - 1] for i in range(1, n)]

# Phi*-standard basis: xi* in E*_0 V, basis E_i xi*.
xis = eigvec(As, theta_star[0])
v = Matrix.hstack(*[eigvec(A, t) for t in theta])
coords_s = v.solve(xis)
Q = Matrix.hstack(*[coords_s[i] * v[:, i] for i in range(n)])
Asrep2 = Q.inv() * As * Q
assert Q.inv() * A * Q == Matrix.diag(*theta)
a_star = [Asrep2[i, i] for i in range(n)]
b_star = [Asrep2[i, i + 1] for i in range(d)]
c_star = [Asrep2[i, i - 1] for i in range(1, n)]

# Split-sequence residue from its definition.
vt = [0] + [varphi[i - 1] - (theta_star[i] - theta_star[0]) * (theta[i - 1] - theta[d])
            for i in range(1, d + 1)] + [0]

phi2_from_brute = (c[0] - a[0] + theta[1]) * (theta_star[2] - theta_star[0])


def s(x):
    return str(Rational(x))


out = {
    "field": "Q",
    "d": d,
    "theta": [s(x) for x in theta],
    "theta_star": [s(x) for x in theta_star],
    "varphi": [s(x) for x in varphi],
    "phi": [s(x) for x in phi],
    "a": [s(x) for x in a],
    "b": [s(x) for x in b],
    "c": [s(x) for x in c],
    "a_star": [s(x) for x in a_star],
    "b_star": [s(x) for x in b_star],
    "c_star": [s(x) for x in c_star],
    "sum_a": s(sum(a)),
    "sum_theta": s(sum(theta)),
    "vartheta": [s(x) for x in vt],
    "varphi2_from_c1_a0": s(phi2_from_brute),
    "standard_rep_A": [[s(Arep[i, j]) for j in range(n)] for i in range(n)],
}
print(json.dumps(out, indent=2))
