# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Two-port building blocks
#
# Everything in the simulator is assembled from three elements: uniform
# transmission-line sections, series lumped impedances and shunt
# admittances, each expressed as a 2x2 ABCD matrix.  This walk-through
# checks the textbook behavior of each block before they are combined
# into a memory cell.

# %%
from qmemsim import (
    SHORT,
    LineSection,
    SeriesCapacitor,
    cascade,
    element_abcd,
    input_impedance,
    notch_s21,
    to_sparams,
)

# a 50-ohm coplanar line on silicon (eps_eff = 6.45) cut to a quarter
# wave at 6.55 GHz
line = LineSection(z0=50.0, eps_eff=6.45, length=4.505e-3)
f0 = line.phase_velocity() / (4.0 * line.length)
print(f"quarter-wave frequency: {f0 / 1e9:.4f} GHz")

tp = element_abcd(line, f0)
print(f"ABCD at f0: a={tp.a:.3e}  b={tp.b:.3f}  c={tp.c:.5f}  d={tp.d:.3e}")
print(f"reciprocity a*d - b*c = {tp.determinant:.12f}")

# %% [markdown]
# Two quarter-wave sections cascade into a half-wave section, which
# inverts the sign of both voltage and current (the ABCD matrix becomes
# -identity):

# %%
half = cascade([tp, tp])
print(f"half-wave cascade: a={half.a:.6f}  d={half.d:.6f}  |b|={abs(half.b):.2e}")

# %% [markdown]
# A shorted stub looks inductive far below resonance and diverges at its
# quarter-wave frequency; that pole is what makes the storage cavity a
# resonator.

# %%
for f in (0.1 * f0, 0.5 * f0, 0.999 * f0):
    z = input_impedance([line], SHORT, f)
    print(f"shorted stub at {f / 1e9:6.3f} GHz: Z = {z:.2f} ohm")

# %% [markdown]
# Tapping a branch across a matched feedline produces the notch
# ("hanger") response: unity transmission for an open branch, a full
# notch when the branch is a short.

# %%
for z_branch in (1e9 + 0j, 25j, 25 + 0j, 0j):
    print(f"branch {z_branch!s:>12} ohm -> S21 = {notch_s21(z_branch, 50.0):.3f}")

# %%
# S-parameters of a small series capacitor: almost fully reflective at
# low frequency, transparent at high frequency
cap = SeriesCapacitor(5e-15)
for f in (1e9, 5e9, 20e9):
    sp = to_sparams(element_abcd(cap, f), 50.0)
    print(
        f"5 fF series cap at {f / 1e9:5.1f} GHz: |S21| = {abs(sp.s21):.4f}, "
        f"|S11|^2+|S21|^2 = {abs(sp.s11) ** 2 + abs(sp.s21) ** 2:.9f}"
    )
