"""Spectral content of the damaged vs elastic response at the hot point."""
import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase, newmark_quasi_newton

PARAMS = reference_concrete()
HOOKE = PARAMS.hooke()

mesh = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(mesh, PARAMS.rho)
K = assemble_stiffness(mesh, HOOKE)
alpha, beta = rayleigh_coeffs(PARAMS.xi, 8.99, 45.8)
system = SpatialSystem(mesh, M, K, alpha * M + beta * K)

A, n_el = 0.0138, 400
load = LoadCase(np.array([A]), np.array([3.0]))
times = np.linspace(0.0, 2.0, 2 * n_el + 1)
dt = times[1] - times[0]

res = newmark_quasi_newton(system, PARAMS, load, times, damage=True)
el = newmark_quasi_newton(system, PARAMS, load, times, damage=False)

gp = 265
for name, run in (("NNR", res), ("elastic", el)):
    s = run["sig"][gp, :, 0]
    late = times >= 1.0
    spec = np.abs(np.fft.rfft(s[late] * np.hanning(late.sum())))
    freq = np.fft.rfftfreq(late.sum(), dt)
    top = np.argsort(spec)[-6:][::-1]
    print("%s hot sig_xx late peaks:" % name,
          " ".join("%.2fHz:%.2e" % (freq[i], spec[i]) for i in top))

# windowed correlation between the two stress histories at the hot point
s1 = res["sig"][gp, :, 0]
s2 = el["sig"][gp, :, 0]
for t0 in (0.0, 0.5, 1.0, 1.5):
    w = (times >= t0) & (times < t0 + 0.5)
    c = np.corrcoef(s1[w], s2[w])[0, 1]
    r = np.sqrt((s1[w] ** 2).sum() / (s2[w] ** 2).sum())
    print("t in [%.1f,%.1f): corr=%.3f  amp ratio NNR/el=%.3f" % (t0, t0 + 0.5, c, r))

# spatial norm of the difference vs time: when does the gap open?
dif = ((res["sig"] - el["sig"]) ** 2).sum(axis=(0, 2))
den = (el["sig"] ** 2).sum(axis=(0, 2))
for t0 in (0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 1.6, 2.0):
    k = int(round(t0 / dt))
    k = min(k, len(times) - 1)
    print("t=%.2f: |dsig|/|sig_el| (inst) = %.3f" % (t0, np.sqrt(dif[k] / max(den[k], 1e-30))))

# displacement at the beam center, vertical dof: drift / ring check
# center node: x=4.0 -> node index via mesh lookup
nodes = mesh.nodes
mid = np.argmin(np.abs(nodes[:, 0] - 4.0) + np.abs(nodes[:, 1] - 0.15) + np.abs(nodes[:, 2] - 0.3))
dof = 3 * mid + 2
u1 = res["u"][dof]
u2 = el["u"][dof]
print("mid node u_z: NNR mean=%.3e el mean=%.3e ; NNR late amp=%.3e el late amp=%.3e"
      % (u1[times > 1].mean(), u2[times > 1].mean(),
         np.ptp(u1[times > 1]) / 2, np.ptp(u2[times > 1]) / 2))
