"""Electron survival + phase droop for composite phase-convention variants."""
import math

import numpy as np

from nvgates import gates, operators as ops, pulses, register as reg

TWO_PI = 2 * math.pi

BASE = (math.pi / 6.0, 0.0, math.pi / 2.0, 0.0, math.pi / 6.0)

variants = {
    "kdd  (+30,0,+90,0,+30), y=+90": (BASE, math.pi / 2),
    "mirror(-30,0,-90,0,-30), y=+90": (tuple(-p for p in BASE), math.pi / 2),
    "kdd, y=-90": (BASE, -math.pi / 2),
    "mirror, y=-90": (tuple(-p for p in BASE), -math.pi / 2),
    "plain (0,0,0,0,0), y=+90": ((0.0,) * 5, math.pi / 2),
}

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
det = pulses.ErrorModel(detuning_on=True)
err0 = pulses.ErrorModel()

for name, (xphases, yshift) in variants.items():
    pulses.X_COMPOSITE_PHASES = xphases
    pulses.Y_COMPOSITE_PHASES = tuple(p + yshift for p in xphases)
    # re-point the classmethod lookup (it closes over module globals)
    import nvgates.pulses as P
    P.X_COMPOSITE_PHASES = pulses.X_COMPOSITE_PHASES
    P.Y_COMPOSITE_PHASES = pulses.Y_COMPOSITE_PHASES
    try:
        plan3 = pulses.tune_sequence(cfg, 3, 17)
    except Exception as exc:
        print(f"{name}: tuner failed: {exc}")
        continue
    u0 = pulses.realized_propagator(plan3, cfg, err0)
    udet = pulses.realized_propagator(plan3, cfg, det)
    leak = np.linalg.norm(udet[:8, 8:])
    droop = pulses.conditional_phase(udet, 3, 3) - math.pi / 2
    ideal = gates.q_gate(gates.GateSpec(3, "x", math.pi / 2), cfg.layout)
    print(f"{name}: fid0={ops.process_fidelity(u0, ideal):.6f} "
          f"fid(det)={ops.process_fidelity(udet, ideal):.6f} leak={leak:.5f} droop={droop:+.6f}")
