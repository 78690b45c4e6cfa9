"""Localize the detuning cost: sections vs central pulses; test variants."""
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
recipe = gates.RecipeSpec(
    gates=tuple(gates.GateSpec(j, "x", math.pi / 2) for j in (1, 2, 3)),
    central_phase=math.pi / 4,
)
sched = pulses.recipe_schedule(recipe, [plans[j] for j in (1, 2, 3)], cfg)
psi0 = ops.kron_all([ops.eigenket("y", 1)] + [ops.eigenket("z", -1)] * 3)
ghz = (ops.kron_all([ops.eigenket("z", -1)] * 3) + 1j * ops.kron_all([ops.eigenket("z", 1)] * 3)) / np.sqrt(2)
target = np.kron(ops.eigenket("y", 1), ghz)

det = pulses.ErrorModel(detuning_on=True)
err0 = pulses.ErrorModel()

# hybrid A: sections with detuning, central rotations algebraic (ideal)
u_pass_det = pulses.realized_propagator(pulses.SequencePlan(tuple(sched.gate_sections[:3])), cfg, det)
shift = [e for e in sched.sections if isinstance(e, pulses.FrameShift)][0]
diag = pulses._correction_diagonal(shift.corrections, 3)
u_pass_det = diag[:, None] * u_pass_det
x_c = gates.electron_rotation(1.5 * math.pi, 0.0, layout)
x_pi = gates.electron_rotation(math.pi, 0.0, layout)
u_hybrid_a = u_pass_det @ x_c @ u_pass_det @ x_pi
print(f"sections det / central ideal : {ops.state_fidelity(u_hybrid_a @ psi0, target):.6f}")

# hybrid B: sections ideal-limit, central rotations with detuning
u_pass_ideal = pulses.realized_propagator(pulses.SequencePlan(tuple(sched.gate_sections[:3])), cfg, err0)
u_pass_ideal = diag[:, None] * u_pass_ideal
xc_det = pulses.realized_propagator(
    pulses.SequencePlan((pulses.PulseEvent(0.0, 1.5 * cfg.t_pi, math.pi),)), cfg, det)
xpi_det = pulses.realized_propagator(
    pulses.SequencePlan((pulses.PulseEvent(0.0, cfg.t_pi, math.pi),)), cfg, det)
u_hybrid_b = u_pass_ideal @ xc_det @ u_pass_ideal @ xpi_det
print(f"sections ideal / central det : {ops.state_fidelity(u_hybrid_b @ psi0, target):.6f}")

# short-way central rotation: X_{1.5pi} == X_{-0.5pi} up to global sign,
# realized as a 6.25 ns pulse about the opposite axis (phase 0 drive).
xc_short_det = pulses.realized_propagator(
    pulses.SequencePlan((pulses.PulseEvent(0.0, 0.5 * cfg.t_pi, 0.0),)), cfg, det)
print(f"short-way Xc fidelity vs algebra: {ops.process_fidelity(xc_short_det, x_c):.6f} (det on)")
u_hybrid_c = u_pass_det @ xc_short_det @ u_pass_det @ xpi_det
print(f"all det, short central       : {ops.state_fidelity(u_hybrid_c @ psi0, target):.6f}")
u_hybrid_d = u_pass_det @ xc_det @ u_pass_det @ xpi_det
print(f"all det, long central        : {ops.state_fidelity(u_hybrid_d @ psi0, target):.6f}")
