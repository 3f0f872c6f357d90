"""Probe: released-energy peak loss from node->Gauss resampling vs N_T."""
import numpy as np

from latinpgd.assembly import (SpatialSystem, assemble_mass, assemble_stiffness,
                               rayleigh_coeffs)
from latinpgd.material import reference_concrete, released_energy, static_damage
from latinpgd.mesh import generate_box_mesh
from latinpgd.newmark import LoadCase, newmark_quasi_newton, resample_fields_to_gauss
from latinpgd.timegrid import TimeGrid

PAR = reference_concrete()
HOOKE = PAR.hooke()
beam = generate_box_mesh(8.0, 0.3, 0.3, 16, 2, 2)
M = assemble_mass(beam, PAR.rho)
K = assemble_stiffness(beam, PAR.hooke())
al, be = rayleigh_coeffs(PAR.xi, 8.99, 45.8)
system = SpatialSystem(beam, M, K, al * M + be * K)
load = LoadCase(np.array([0.00965]), np.array([3.0]))

for n_t in (400, 800, 1200, 1600):
    grid = TimeGrid(2.0, n_t)
    times = np.linspace(0.0, 2.0, 2 * n_t + 1)
    res = newmark_quasi_newton(system, PAR, load, times, damage=False)
    Yn = released_energy(res["eps"].reshape(-1, 6), HOOKE).reshape(
        res["eps"].shape[:2])
    eps_g, _ = resample_fields_to_gauss(grid, res)
    Yg = released_energy(eps_g.reshape(-1, 6), HOOKE).reshape(eps_g.shape[:2])
    pn, pg = Yn.max(axis=1), Yg.max(axis=1)
    gp = int(pn.argmax())
    dn = static_damage(pn, PAR).max()
    dg = static_damage(pg, PAR).max()
    print(f"N_T={n_t:5d}  node Y_max={pn.max():7.2f} (gp {gp:3d})  "
          f"gauss Y_max={pg.max():7.2f}  loss={100*(1-pg.max()/pn.max()):5.2f}%  "
          f"dbar node/gauss = {dn:.4f}/{dg:.4f}", flush=True)

# ring content at the hottest point, finest run
y = Yn[gp]
dt = times[1] - times[0]
spec = np.abs(np.fft.rfft(y - y.mean()))
freqs = np.fft.rfftfreq(y.size, dt)
top = np.argsort(spec)[-4:][::-1]
print("dominant Y frequencies at hot point (Hz):",
      np.array2string(freqs[top], precision=1))
