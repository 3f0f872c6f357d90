"""Quasi-brittle isotropic damage with delay regularization and crack re-closure.

The constitutive state at a point is (eps, sigma, d, Y, z, Z):

* Y = 1/2 <eps>+ : E : <eps>+ is the released energy density (J/m^3); only
  positive principal strains contribute, so compression never damages.
* The quasi-static damage is d_bar = 1 - 1/(1 + A_d (Y - Y0)) above the
  activation threshold Y0; z = -d_bar and Z = (1/A_d)(-1 + 1/(1+z)) are the
  dual softening variables, chosen so the threshold function
  f = Y - (Y0 + Z) closes to zero at the updated state.
* The effective damage d follows d_bar through the delay law
  d_dot = (1/tau_c)(1 - exp(-a <d_bar - d>+)), which caps the damage rate at
  1/tau_c and regularizes the softening.
* Stress combines the damaged elastic part with a progressive crack
  re-closure term:  sigma = (1-d) E:eps + d E:F(eps), where F pulls the
  strain back towards the recorded tension peak eps_max and recovers the
  full stiffness in deep compression.

The nonlinear update stage evaluates this model at every spatial Gauss point
over the whole time axis at once; points are independent, so everything is
vectorized over space.
"""

from dataclasses import dataclass

import numpy as np

from .tensors import HookeTensor, positive_part_energy

CLOSURE_TRACE_GUARD = 1e-12


@dataclass(frozen=True)
class MaterialParams:
    """Density, elasticity and damage parameters of the concrete-like model."""

    rho: float      # kg/m^3
    E: float        # Pa
    nu: float       # -
    Y0: float       # J/m^3, damage activation threshold
    A_d: float      # m^3/J, brittleness
    tau_c: float    # s, delay time constant
    a: float        # -, delay exponential constant
    a_c: float      # -, crack-closure constant
    xi: float = 0.0  # -, modal damping ratio

    def __post_init__(self):
        for name in ("rho", "E", "Y0", "A_d", "tau_c", "a", "a_c"):
            if getattr(self, name) <= 0.0:
                raise ValueError("%s must be positive, got %g" % (name, getattr(self, name)))
        if not -1.0 < self.nu < 0.5:
            raise ValueError("Poisson ratio must lie in (-1, 0.5)")
        if not 0.0 <= self.xi < 1.0:
            raise ValueError("damping ratio must lie in [0, 1)")

    def hooke(self):
        return HookeTensor(self.E, self.nu)


def reference_concrete():
    """The reference parameter set used throughout the bending-beam studies."""
    return MaterialParams(rho=2550.0, E=37.9e9, nu=0.2, Y0=150.0, A_d=8.0e-3,
                          tau_c=0.05, a=15.0, a_c=9.0, xi=0.02)


def released_energy(eps_v, hooke):
    """Y = 1/2 <eps>+ : E : <eps>+ for engineering-strain Voigt fields (..., 6)."""
    return positive_part_energy(eps_v, hooke)


def static_damage(Y, params):
    """Quasi-static damage d_bar(Y); zero at and below the activation threshold."""
    Y = np.asarray(Y, dtype=float)
    over = np.maximum(Y - params.Y0, 0.0)
    return 1.0 - 1.0 / (1.0 + params.A_d * over)


def dual_softening(z, params):
    """Thermodynamic dual Z(z) = (1/A_d)(-1 + 1/(1+z)) for z in (-1, 0]."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= -1.0):
        raise ValueError("softening variable z must stay above -1")
    return (-1.0 + 1.0 / (1.0 + z)) / params.A_d


def _delay_rate(gap, params):
    return (1.0 - np.exp(-params.a * np.maximum(gap, 0.0))) / params.tau_c


def integrate_delay(times, dbar, d_init, params):
    """Integrate d_dot = (1/tau_c)(1 - exp(-a <d_bar - d>+)) along the time axis.

    times : sample instants (n_t,), strictly increasing, starting after 0.
    dbar : target damage samples (..., n_t); linear interpolation in between,
        constant extrapolation on the leading [0, times[0]] gap.
    d_init : initial damage at t = 0 (scalar or shape (...)).

    Classic one-step 4-stage integration on substeps no longer than tau_c/20;
    the right-hand side is bounded by 1/tau_c and Lipschitz, so the explicit
    scheme is stable at that step.  Returns d at the sample instants.
    """
    times = np.asarray(times, dtype=float)
    dbar = np.asarray(dbar, dtype=float)
    n_t = times.size
    if dbar.shape[-1] != n_t:
        raise ValueError("dbar last axis must match times")
    d = np.empty_like(dbar)
    cur = np.broadcast_to(np.asarray(d_init, dtype=float), dbar.shape[:-1]).copy()
    h_max = params.tau_c / 20.0
    prev_t = 0.0
    prev_db = dbar[..., 0]  # flat extrapolation before the first sample
    for k in range(n_t):
        span = times[k] - prev_t
        db0, db1 = prev_db, dbar[..., k]
        n_sub = max(1, int(np.ceil(span / h_max)))
        h = span / n_sub
        for s in range(n_sub):
            f0 = db0 + (db1 - db0) * (s / n_sub)
            fh = db0 + (db1 - db0) * ((s + 0.5) / n_sub)
            f1 = db0 + (db1 - db0) * ((s + 1.0) / n_sub)
            k1 = _delay_rate(f0 - cur, params)
            k2 = _delay_rate(fh - (cur + 0.5 * h * k1), params)
            k3 = _delay_rate(fh - (cur + 0.5 * h * k2), params)
            k4 = _delay_rate(f1 - (cur + h * k3), params)
            cur = cur + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        d[..., k] = cur
        prev_t = times[k]
        prev_db = db1
    return d


def _softplus(x):
    """log(1 + exp(x)) evaluated without overflow."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.0, x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def crack_closure_stress(eps_v, eps_max_v, params, hooke):
    """Re-closure stress E : [eps - (eps_max/a_c) log(1 + exp(a_c tr eps / tr eps_max))].

    Requires a genuine tension history: tr(eps_max) must exceed the guard
    threshold (the expression divides by it).  Fields are strain-Voigt (..., 6).
    """
    eps_v = np.asarray(eps_v, dtype=float)
    eps_max_v = np.asarray(eps_max_v, dtype=float)
    tr_max = eps_max_v[..., :3].sum(axis=-1)
    if np.any(tr_max <= CLOSURE_TRACE_GUARD):
        raise ValueError("crack closure needs tr(eps_max) > %g; use the "
                         "zero-history branch instead" % CLOSURE_TRACE_GUARD)
    tr = eps_v[..., :3].sum(axis=-1)
    factor = _softplus(params.a_c * tr / tr_max) / params.a_c
    return hooke.apply(eps_v - factor[..., None] * eps_max_v)


def total_stress(eps_v, eps_max_v, d, params, hooke):
    """sigma = (1-d) E:eps + d E:F(eps) with the zero-history guard branch.

    eps_v, eps_max_v: strain-Voigt (..., 6); d: (...).  Returns stress Voigt.
    """
    eps_v = np.asarray(eps_v, dtype=float)
    eps_max_v = np.asarray(eps_max_v, dtype=float)
    d = np.asarray(d, dtype=float)
    elastic = hooke.apply(eps_v)
    tr_max = eps_max_v[..., :3].sum(axis=-1)
    closed = tr_max > CLOSURE_TRACE_GUARD
    sig_cr = np.zeros_like(elastic)
    if np.any(closed):
        sig_cr[closed] = crack_closure_stress(eps_v[closed], eps_max_v[closed],
                                              params, hooke)
    return (1.0 - d)[..., None] * elastic + d[..., None] * sig_cr


def tension_peak_history(eps_v):
    """Running tension peak along the time axis.

    eps_v: strain-Voigt (..., n_t, 6).  Returns (eps_max, tr_max) where
    eps_max[..., t, :] is the strain at the running argmax of tr(eps) over
    [0, t] (earliest index on ties, so the scan is deterministic).
    """
    eps_v = np.asarray(eps_v, dtype=float)
    tr = eps_v[..., :3].sum(axis=-1)
    n_t = tr.shape[-1]
    run = np.maximum.accumulate(tr, axis=-1)
    is_new = np.empty(tr.shape, dtype=bool)
    is_new[..., 0] = True
    is_new[..., 1:] = tr[..., 1:] > run[..., :-1]
    cand = np.where(is_new, np.arange(n_t), 0)
    idx = np.maximum.accumulate(cand, axis=-1)
    eps_max = np.take_along_axis(eps_v, idx[..., None], axis=-2)
    return eps_max, np.take_along_axis(tr, idx, axis=-1)


def local_stage(eps, Y_prev, Z_prev, z_prev, d_prev, times, params, hooke):
    """Nonlinear update stage: constitutive relations at every Gauss point.

    All fields live on the (spatial Gauss x temporal Gauss) grid: eps has
    shape (n_sp, n_t, 6), the scalars (n_sp, n_t).  Per point and instant:
    the released energy is evaluated on the input strain, the damage
    variables are refreshed wherever the threshold f = Y - (Y0 + Z_prev) is
    exceeded (and kept otherwise), the delayed damage is re-integrated from
    d(0) = 0 over the whole axis, and the stress combines the damaged and
    re-closure branches using the running tension peak of the input strain.

    Returns a dict with keys eps, sig, d, Y, z, Z, dbar, eps_max.
    """
    eps = np.asarray(eps, dtype=float)
    if not np.all(np.isfinite(eps)):
        bad = np.nonzero(~np.isfinite(eps).all(axis=(1, 2)))[0][0]
        raise ValueError("non-finite strain input at spatial Gauss point %d" % bad)
    Y = released_energy(eps, hooke)
    f_c = Y - (params.Y0 + np.asarray(Z_prev, dtype=float))
    damaging = f_c > 0.0

    dbar = np.where(damaging, static_damage(Y, params),
                    -np.asarray(z_prev, dtype=float))
    z = -dbar
    Z = np.where(damaging, dual_softening(z, params), Z_prev)

    d = integrate_delay(times, dbar, 0.0, params)
    eps_max, _ = tension_peak_history(eps)
    sig = total_stress(eps, eps_max, d, params, hooke)
    # The strain echo is a copy: the caller may keep mutating the input
    # array (incremental reconstruction caches do), and the returned dict
    # must stay a consistent snapshot of this update.
    return {"eps": eps.copy(), "sig": sig, "d": d, "Y": Y, "z": z, "Z": Z,
            "dbar": dbar, "eps_max": eps_max}


def matpoint_drive(times, eps_x, params):
    """Drive a single material point with a uniaxial-strain history.

    The kinematics are uniaxial strain, eps = diag(eps_x, 0, 0); the damage
    variables start virgin and the update stage is evaluated once (it is
    idempotent for a fixed strain input, so one pass gives the converged
    constitutive response).

    Returns a dict of time series: sig_x, d, dbar, Y.
    """
    times = np.asarray(times, dtype=float)
    eps_x = np.asarray(eps_x, dtype=float)
    n_t = times.size
    if eps_x.shape != (n_t,):
        raise ValueError("eps_x must have shape (%d,)" % n_t)
    eps = np.zeros((1, n_t, 6))
    eps[0, :, 0] = eps_x
    zero = np.zeros((1, n_t))
    out = local_stage(eps, zero, zero, zero, zero, times, params, params.hooke())
    return {"sig_x": out["sig"][0, :, 0], "d": out["d"][0], "dbar": out["dbar"][0],
            "Y": out["Y"][0]}
