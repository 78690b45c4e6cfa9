"""Conditional phases under detuning; composite phase-convention variants."""
import math

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
harmonics = {1: 11, 2: 17, 3: 17}
plans = {j: pulses.tune_sequence(cfg, j, harmonics[j]) for j in (1, 2, 3)}

det = pulses.ErrorModel(detuning_on=True)
eps = pulses.ErrorModel(rabi_error=0.01)
both = pulses.ErrorModel(rabi_error=0.01, detuning_on=True)
err0 = pulses.ErrorModel()

print("=== conditional phase of each tuned gate under error models ===")
for j in (1, 2, 3):
    row = {}
    for name, em in [("none", err0), ("det", det), ("eps", eps), ("both", both)]:
        u = pulses.realized_propagator(plans[j], cfg, em)
        row[name] = pulses.conditional_phase(u, j, 3)
    print(f"gate {j}: " + "  ".join(f"{k}={v:+.6f}" for k, v in row.items()))

print("\n=== electron leakage of section propagator (off-diagonal block norm) ===")
for j in (1, 2, 3):
    for name, em in [("none", err0), ("det", det)]:
        u = pulses.realized_propagator(plans[j], cfg, em)
        half = 8
        leak = np.linalg.norm(u[:half, half:])
        print(f"gate {j} [{name}]: leak={leak:.5f}")

print("\n=== per-gate process fidelity vs ideal under detuning ===")
layout = cfg.layout
for j in (1, 2, 3):
    ideal = gates.q_gate(gates.GateSpec(j, "x", math.pi / 2), layout)
    u = pulses.realized_propagator(plans[j], cfg, det)
    print(f"gate {j}: fid(det) = {ops.process_fidelity(u, ideal):.6f}")
