"""Measure PGD fixed-point behavior to freeze test bounds."""
import numpy as np
import scipy.sparse.linalg as spla

from latinpgd.assembly import (SpatialSystem, assemble_mass,
                               assemble_stiffness, internal_force,
                               strain_at_gauss)
from latinpgd.material import reference_concrete
from latinpgd.mesh import generate_box_mesh
from latinpgd.pgd import (PgdMode, PgdSolution, compress_basis, compute_delta,
                          cre_functional, enrich, normalize_mode,
                          space_problem, stagnation, stress_spatial,
                          time_lambda, time_mu)
from latinpgd.timegrid import TimeFunction, TimeGrid, l2_fit, st_inner

P = reference_concrete()
HOOKE = P.hooke()

mesh = generate_box_mesh(1.0, 1.0, 1.0, 2, 2, 2, support="line")
M = assemble_mass(mesh, P.rho)
K = assemble_stiffness(mesh, HOOKE)
system = SpatialSystem(mesh, M, K)
grid = TimeGrid(0.5, 8)
rng = np.random.default_rng(42)
print("free dofs", system.n_free, "n_sg", mesh.n_gauss, "n_tg", grid.n_gauss)

# --- fundamental frequency scale of the probe ---
freqs, _ = system.modal(1)
print("probe f1 = %.3f Hz   (omega*T = %.1f)" % (freqs[0], 2 * np.pi * freqs[0] * grid.T))

# --- manufactured space problem: Delta = E:eps(w) * lam(t), lam = t ---
w = np.zeros(mesh.n_dofs)
w[system.free] = rng.normal(size=system.n_free) * 1e-4
eps_w = strain_at_gauss(mesh, w)
lam_lin = TimeFunction(grid, grid.node_times.copy())
delta_man = HOOKE.apply(eps_w)[:, None, :] * lam_lin.values_at_gauss()[None, :, None]
u_bar, eps_bar = space_problem(lam_lin, delta_man, system)
print("manufactured space problem: rel err = %.3e"
      % (np.linalg.norm(u_bar - w) / np.linalg.norm(w)))

# --- static oracle: lam == 1 ---
lam_one = TimeFunction(grid, np.ones((grid.n_elements, 4)))
rngd = np.random.default_rng(3)
delta_rand = rngd.normal(size=(mesh.n_gauss, grid.n_gauss, 6)) * 1e5
u_s, _ = space_problem(lam_one, delta_rand, system)
davg = np.einsum("gtv,t->gv", delta_rand, grid.all_gauss_weights) / grid.T
rhs = internal_force(mesh, davg)[system.free]
u_oracle = spla.spsolve(system.Kff.tocsc(), rhs)
print("static oracle rel err = %.3e"
      % (np.linalg.norm(u_s[system.free] - u_oracle) / np.linalg.norm(u_oracle)))

# --- time_mu dense oracle ---
sig_b = rngd.normal(size=(mesh.n_gauss, 6)) * 1e5
eps_b = rngd.normal(size=(mesh.n_gauss, 6)) * 1e-5
lam_r = TimeFunction(grid, rngd.normal(size=(grid.n_elements, 4)))
mu_fit = time_mu(sig_b, eps_b, lam_r, delta_rand, HOOKE, grid, mesh)
# dense normal equations over all temporal nodal DOFs
wg = mesh.gp_weights.ravel()
wt = grid.all_gauss_weights
den = wg @ np.einsum("gv,gv->g", HOOKE.apply_inverse(sig_b), sig_b)
se = wg @ np.einsum("gv,gv->g", sig_b, eps_b)
sd = np.einsum("gv,gtv,g->t", HOOKE.apply_inverse(sig_b), delta_rand, wg)
num = se * lam_r.values_at_gauss() - sd
nloc = grid.N  # (4 gauss, 4 nodes)
A = np.zeros((grid.n_elements * 4, grid.n_elements * 4))
b = np.zeros(grid.n_elements * 4)
for k in range(grid.n_elements):
    wloc = grid.gauss_weights_local * grid.h
    A[4 * k:4 * k + 4, 4 * k:4 * k + 4] = den * (nloc * wloc[:, None]).T @ nloc
    b[4 * k:4 * k + 4] = (nloc * wloc[:, None]).T @ num[4 * k:4 * k + 4]
mu_dense = np.linalg.solve(A, b).reshape(grid.n_elements, 4)
print("time_mu vs dense normal equations: rel err = %.3e"
      % (np.abs(mu_fit.coeffs - mu_dense).max() / np.abs(mu_dense).max()))

# --- manufactured rank-one enrichment: CRE drop ---
for gname, gfun in [("g=t", lambda t: t),
                    ("g=halfsine", lambda t: np.sin(np.pi * t / grid.T)),
                    ("g=3Hz", lambda t: np.sin(2 * np.pi * 3.0 * t))]:
    gv = gfun(grid.all_gauss_times)
    delta1 = HOOKE.apply(eps_w)[:, None, :] * gv[None, :, None]
    j0 = cre_functional(delta1, mesh, grid, HOOKE)
    mode, info = enrich(delta1, system, grid, HOOKE, np.random.default_rng(7))
    j1 = cre_functional(delta1, mesh, grid, HOOKE, mode)
    print("%-12s J0=%.6e  J1=%.6e  ratio=%.3e  sweeps=%d zeta=%s"
          % (gname, j0, j1, j0 / j1, info["iterations"],
             ["%.2e" % z for z in info["zeta"]]))

# --- J decrease on a generic random Delta ---
j0 = cre_functional(delta_rand, mesh, grid, HOOKE)
mode_r, info_r = enrich(delta_rand, system, grid, HOOKE, np.random.default_rng(11))
j1 = cre_functional(delta_rand, mesh, grid, HOOKE, mode_r)
print("random Delta: J0=%.6e J1=%.6e ratio=%.3f sweeps=%d zeta=%s"
      % (j0, j1, j0 / j1, info_r["iterations"], ["%.2e" % z for z in info_r["zeta"]]))

# --- determinism ---
m2, _ = enrich(delta_rand, system, grid, HOOKE, np.random.default_rng(11))
print("determinism: u_bar identical =", np.array_equal(mode_r.u_bar, m2.u_bar),
      " lam identical =", np.array_equal(mode_r.lam.coeffs, m2.lam.coeffs))

# --- compression checks ---
sol = PgdSolution(mesh, grid, HOOKE,
                  np.zeros((mesh.n_dofs, grid.n_gauss)),
                  np.zeros((mesh.n_gauss, grid.n_gauss, 6)),
                  np.zeros((mesh.n_gauss, grid.n_gauss, 6)))
for seed in range(5):
    r = np.random.default_rng(seed)
    ub = np.zeros(mesh.n_dofs)
    ub[system.free] = r.normal(size=system.n_free)
    eb = strain_at_gauss(mesh, ub)
    md = PgdMode(ub, eb, HOOKE.apply(eb) * r.uniform(0.5, 2.0),
                 TimeFunction(grid, r.normal(size=(grid.n_elements, 4))),
                 TimeFunction(grid, r.normal(size=(grid.n_elements, 4))))
    _, md = normalize_mode(md, mesh)
    sol.add_mode(md)
u0, e0, s0 = sol.fields()

full = compress_basis(sol, rank=5)
uf, ef, sf = full.fields()
print("compress rank=m: eps rel %.2e  sig rel %.2e  u rel %.2e"
      % (np.abs(ef - e0).max() / np.abs(e0).max(),
         np.abs(sf - s0).max() / np.abs(s0).max(),
         np.abs(uf - u0).max() / np.abs(u0).max()))

dup = PgdSolution(mesh, grid, HOOKE, sol.u_el, sol.eps_el, sol.sig_el)
for md in sol.modes:
    dup.add_mode(md.copy())
dup.add_mode(sol.modes[2].copy())
dup.add_mode(sol.modes[2].copy())
comp = compress_basis(dup, tol=1e-10)
ud, ed, sd2 = comp.fields()
udup, edup, sdup = dup.fields()
print("duplicate modes: n=%d -> %d;  eps rel %.2e sig rel %.2e"
      % (dup.n_modes, comp.n_modes, np.abs(ed - edup).max() / np.abs(edup).max(),
         np.abs(sd2 - sdup).max() / np.abs(sdup).max()))

lossy = compress_basis(sol, tol=0.5)
ul, el, sl = lossy.fields()


def family_norm_eps(e):
    q = np.einsum("gtv,gtv,g,t->", e, HOOKE.apply(e), wg, wt)
    return np.sqrt(q)


print("lossy tol=0.5: n=%d -> %d, eps family rel err %.3f (bound 0.5)"
      % (sol.n_modes, lossy.n_modes,
         family_norm_eps(el - e0) / family_norm_eps(e0)))
