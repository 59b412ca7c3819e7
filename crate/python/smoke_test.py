"""Smoke test for the pyspheroidal extension module.

Build and install first:
    pip install maturin
    pip install --no-build-isolation -e crates/python
"""

import math

import numpy as np
from scipy import integrate
from scipy.special import pro_cv

import pyspheroidal as ps


def check(name, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")
    if not ok:
        raise SystemExit(1)


def spectral():
    g = ps.eigenvalues(0, 0.0, 6)
    check("spherical limit", g == [l * (l + 1) for l in range(7)])
    worst = 0.0
    for m in range(4):
        for gamma in (1.0, 4.0, 10.0):
            ours = ps.eigenvalues(m, gamma, m + 6)
            ref = [pro_cv(m, l, gamma) - gamma**2 for l in range(m, m + 7)]
            worst = max(worst, max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(ours, ref)))
    check("agrees with scipy pro_cv", worst < 1e-9, f"max rel diff {worst:.2e}")

    e = ps.eigenpair(3, 1, 5.0)
    eta = np.linspace(-1.0, 1.0, 2001)
    vals = np.array([e.eval(x) for x in eta])
    norm = integrate.simpson(vals**2, x=eta)
    check("unit norm", abs(norm - 1.0) < 1e-6, f"{norm:.10f}")
    check("parity", e.parity == "even" and np.allclose(vals, vals[::-1], atol=1e-12))
    z = e.eval_z(0.4, 1.1)
    check("eval_z phase", abs(abs(z) - abs(e.eval(math.cos(0.4))) / math.sqrt(2 * math.pi)) < 1e-12)

    fd = ps.oracle_eigenvalues(2, 4.0, 5)
    spec = ps.eigenvalues(2, 4.0, 6)
    check("finite-difference oracle", all(abs(a - g) <= 3 * err for (g, err), a in zip(fd, spec)))


def lattice():
    spec = ps.JointSpectrum(16.0, 28, 38)
    check("negative states", spec.count_negative() == 10)
    mono = spec.monodromy()
    check("monodromy", mono.matrix == [[1, 0], [2, 1]] and mono.index == 2, repr(mono))
    check("reversed loop", spec.monodromy(clockwise=True).index == -2)
    check("s2 classes", spec.monodromy("s2even").index == 1 and spec.monodromy("s2odd").index == 1)
    trivial = spec.rectangle_monodromy(2, 12, 20.0, 200.0)
    check("non-enclosing loop", trivial.matrix == [[1, 0], [0, 1]])
    try:
        spec.monodromy("nonsense")
        rejected = False
    except ValueError:
        rejected = True
    check("bad symmetry rejected", rejected)


def classical():
    params = ps.SystemParams.unit_speed(4.0)
    check("action at origin", abs(ps.action(0.0, 0.0, params) - 8.0 / math.pi) < 1e-10)

    p, l = [0.0, 0.6, 0.8], [1.0, 0.0, 0.0]
    b = ps.reduce(p, l, params)
    back_p, back_l = ps.reconstruct(b, params, math.atan2(p[1], p[0]))
    check("reduce/reconstruct", np.allclose(back_p, p) and np.allclose(back_l, l))

    rows = np.array(ps.integrate_flow(p, l, params, flow="g", t_end=2.0, dt=1e-3, record_every=100))
    drift = np.abs(rows[:, 7:] - rows[0, 7:]).max()
    check("flow conserves integrals", drift < 1e-9, f"{drift:.2e}")

    kind, beta, eig = ps.classify([0.0, 0.0, 1.0], [0.0, 0.0, 0.0], params, beta=1.0)
    check("pole is focus-focus", kind == "focus-focus" and all(abs(abs(z.real) - 4.0) < 1e-8 for z in eig))
    kind, beta, eig = ps.classify([0.0, 1.0, 0.0], [0.0, 0.0, 2.0], params)
    check("equator is elliptic", kind == "elliptic-transversal" and abs(beta + 2.0) < 1e-12)

    zp, zl = ps.pinched_torus(0.3, 0.5, 1.0, params)
    c1, c2, g, lz = ps.integrals(zp, zl, params)
    check("pinched torus", abs(c1 - 1) < 1e-12 and abs(c2) < 1e-12 and abs(g) < 1e-12 and abs(lz) < 1e-12)


if __name__ == "__main__":
    spectral()
    lattice()
    classical()
    print("all checks passed")
