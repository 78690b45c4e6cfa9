"""Expectation-value curves over the central phase grid + jitter sweep trend."""
import math
import time

import numpy as np

from nvgates import gates, operators as ops, pulses, register as reg

TWO_PI = 2 * math.pi

cfg = reg.RegisterConfig(
    bz=0.65,
    nuclei=(
        reg.NuclearSpin(hyperfine=tuple(TWO_PI * 1e3 * a for a in (-56.0, -32.0, -45.0)), label="C1"),
        reg.NuclearSpin(hyperfine=tuple(TWO_PI * 1e3 * a for a in (-7.6, 39.0, 52.0)), label="C2"),
        reg.NuclearSpin(hyperfine=tuple(TWO_PI * 1e3 * a for a in (-22.0, 13.0, 96.0)), label="C3"),
    ),
    couplings=((1, 2, -TWO_PI * 20.0), (1, 3, -TWO_PI * 10.0), (2, 3, TWO_PI * 7.5)),
    rabi_hz=20e6,
    rabi_error=0.01,
    include_detuning=True,
    include_internuclear=True,
)
layout = cfg.layout
harmonics = {1: 11, 2: 17, 3: 17}
plans = [pulses.tune_sequence(cfg, j, harmonics[j]) for j in (1, 2, 3)]
err = pulses.ErrorModel(rabi_error=0.01, detuning_on=True)

psi0 = ops.kron_all([ops.eigenket("y", 1)] + [ops.eigenket("z", -1)] * 3)
sz1 = ops.embed(ops.SIGMA_Z, 1, layout)
szzz = ops.pauli_string({1: "z", 2: "z", 3: "z"}, layout)

cache = {}
t0 = time.time()
max_dev1 = max_dev3 = 0.0
rows = []
for phi_over_pi in np.linspace(0.0, 2.0, 41):
    phi = phi_over_pi * math.pi
    recipe = gates.RecipeSpec(
        gates=tuple(gates.GateSpec(j, "x", math.pi / 2) for j in (1, 2, 3)),
        central_phase=phi,
    )
    u_ideal = gates.compose_recipe(recipe, layout)
    psi_ideal = u_ideal @ psi0
    sched = pulses.recipe_schedule(recipe, plans, cfg)
    psi_sim = pulses.simulate(sched, cfg, err, initial=psi0, cache=cache)
    i1, s1 = ops.expectation(sz1, psi_ideal), ops.expectation(sz1, psi_sim)
    i3, s3 = ops.expectation(szzz, psi_ideal), ops.expectation(szzz, psi_sim)
    max_dev1 = max(max_dev1, abs(i1 - s1))
    max_dev3 = max(max_dev3, abs(i3 - s3))
    rows.append((phi_over_pi, i1, s1, i3, s3))
    # ideal columns must match -cos(2 phi)
    assert abs(i1 - (-math.cos(2 * phi))) < 1e-10, (phi, i1)
    assert abs(i3 - (-math.cos(2 * phi))) < 1e-10, (phi, i3)

print(f"grid time: {time.time()-t0:.2f} s")
print(f"max |sim - ideal| for <sz1>    = {max_dev1:.4f}")
print(f"max |sim - ideal| for <szzz>   = {max_dev3:.4f}")
for r in rows[::8]:
    print(f"  phi/pi={r[0]:.2f}  sz1: {r[1]:+.4f} vs {r[2]:+.4f}   szzz: {r[3]:+.4f} vs {r[4]:+.4f}")

# jitter sweep trend (reduced runs for the probe)
print("\n=== phase-jitter sweep (20 runs/point) ===")
recipe = gates.RecipeSpec(
    gates=tuple(gates.GateSpec(j, "x", math.pi / 2) for j in (1, 2, 3)),
    central_phase=math.pi / 4,
)
sched = pulses.recipe_schedule(recipe, plans, cfg)
ghz = (ops.kron_all([ops.eigenket("z", -1)] * 3) + 1j * ops.kron_all([ops.eigenket("z", 1)] * 3)) / np.sqrt(2)
target = np.kron(ops.eigenket("y", 1), ghz)
t0 = time.time()
for theta_deg in (0.0, 5.0, 10.0, 15.0, 20.0, 25.0):
    fids = []
    for run in range(20):
        em = pulses.ErrorModel(
            rabi_error=0.01, detuning_on=True,
            phase_jitter=math.radians(theta_deg),
            rng_seed=pulses.derive_seed(12345, int(theta_deg * 10), run),
        )
        psi = pulses.simulate(sched, cfg, em, initial=psi0, cache=cache)
        fids.append(ops.state_fidelity(psi, target))
    print(f"theta={theta_deg:5.1f} deg: mean={np.mean(fids):.4f} +- {np.std(fids)/math.sqrt(len(fids)):.4f}")
print(f"sweep time: {time.time()-t0:.1f} s")
