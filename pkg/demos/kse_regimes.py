#!/usr/bin/env python3
# # Kuramoto-Sivashinsky regimes
#
# On a periodic domain of length L the KS equation settles onto a travelling
# wave (L=12), a quasiperiodic beating wave (L=29.30) or chaos (L=22). The
# translation-invariant Fourier amplitudes |u_k| tell them apart: constant for
# the travelling wave, periodic for the beating wave, never recurring for chaos.

import numpy as np

from kdla.metrics import amplitude_recurrence, drift_period, energy
from kdla.systems import recipe, sample_ics, simulate

# ## Travelling wave

rec = recipe("kse-tw")
tw = simulate(rec, sample_ics(rec, 1), t_end=rec.transient + 200.0)[0]
E = energy(tw)
print(f"L=12: energy range {E.min():.6f} .. {E.max():.6f}, drift period {drift_period(tw):.1f}")

# ## Beating wave
#
# The amplitudes recur with the beating period while the pattern slowly drifts;
# the two time scales differ by about two orders of magnitude.

rec = recipe("kse-beating")
qp = simulate(rec, sample_ics(rec, 1), t_end=rec.transient + 1000.0)[0]
lag, miss = amplitude_recurrence(qp, range(10, 2000), tol=0.1)
Tb, Ttr = lag * rec.dt, drift_period(qp)
print(f"L=29.30: beating period {Tb:.2f} (mismatch {miss:.3f}), travel period {Ttr:.0f}, ratio {Ttr / Tb:.0f}")

# ## Chaos

rec = recipe("kse-chaos")
ch = simulate(rec, sample_ics(rec, 1), t_end=rec.transient + 500.0)[0]
_, best = amplitude_recurrence(ch, range(20, ch.states.shape[1] // 2, 5))
print(f"L=22: max|u| {np.abs(ch.states).max():.2f}, best recurrence mismatch {best:.3f}")
