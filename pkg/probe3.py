"""Check realized_propagator composition against a manual element product."""
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
layout = cfg.layout
harmonics = {1: 11, 2: 17, 3: 17}
plans = {j: pulses.tune_sequence(cfg, j, harmonics[j]) for j in (1, 2, 3)}
err0 = pulses.ErrorModel()

recipe = gates.RecipeSpec(
    gates=tuple(gates.GateSpec(j, "x", math.pi / 2) for j in (1, 2, 3)),
    central_phase=math.pi / 4,
)
sched = pulses.recipe_schedule(recipe, [plans[j] for j in (1, 2, 3)], cfg)
u_full = pulses.realized_propagator(sched, cfg, err0)

u_g = {j: pulses.realized_propagator(plans[j], cfg, err0) for j in (1, 2, 3)}
xc = pulses.realized_propagator(
    pulses.SequencePlan((pulses.PulseEvent(0.0, 1.5 * cfg.t_pi, math.pi),)), cfg, err0
)
xpi = pulses.realized_propagator(
    pulses.SequencePlan((pulses.PulseEvent(0.0, cfg.t_pi, math.pi),)), cfg, err0
)
u_manual = u_g[3] @ u_g[2] @ u_g[1] @ xc @ u_g[3] @ u_g[2] @ u_g[1] @ xpi
print("max |u_full - u_manual| =", np.abs(u_full - u_manual).max())
print("process fid(u_full, u_manual) =", ops.process_fidelity(u_full, u_manual))

psi0 = ops.kron_all([ops.eigenket("y", 1)] + [ops.eigenket("z", -1)] * 3)
ghz = (ops.kron_all([ops.eigenket("z", -1)] * 3) + 1j * ops.kron_all([ops.eigenket("z", 1)] * 3)) / np.sqrt(2)
target = np.kron(ops.eigenket("y", 1), ghz)
print("manual GHZ fid =", ops.state_fidelity(u_manual @ psi0, target))

# order within passes: 1,2,3 vs 3,2,1
u_manual_b = u_g[1] @ u_g[2] @ u_g[3] @ xc @ u_g[1] @ u_g[2] @ u_g[3] @ xpi
print("other order GHZ fid =", ops.state_fidelity(u_manual_b @ psi0, target))

# algebraic rotations instead of realized ones
x_c_alg = gates.electron_rotation(2 * (math.pi / 4) + math.pi, 0.0, layout)
x_pi_alg = gates.electron_rotation(math.pi, 0.0, layout)
u_alg_rot = u_g[1] @ u_g[2] @ u_g[3] @ x_c_alg @ u_g[1] @ u_g[2] @ u_g[3] @ x_pi_alg
print("algebraic-rotation GHZ fid =", ops.state_fidelity(u_alg_rot @ psi0, target))
u_alg_rot2 = u_g[3] @ u_g[2] @ u_g[1] @ x_c_alg @ u_g[3] @ u_g[2] @ u_g[1] @ x_pi_alg
print("algebraic-rotation (3,2,1) GHZ fid =", ops.state_fidelity(u_alg_rot2 @ psi0, target))
