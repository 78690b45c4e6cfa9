"""Dissect the error structure of realized gates and the recipe composition."""
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

def pauli_decompose_error(u_real, u_ideal):
    """Project log(U_ideal^dag U_real) onto the Pauli basis, report big terms."""
    e = u_ideal.conj().T @ u_real
    # remove global phase
    tr = np.trace(e)
    e = e * np.exp(-1j * np.angle(tr))
    from scipy.linalg import logm
    gen = logm(e)
    gen = (gen - gen.conj().T) / 2.0  # anti-Hermitian part
    h = 1j * gen  # Hermitian error generator, e = exp(-i h)
    labels = {}
    import itertools
    for combo in itertools.product(["i", "x", "y", "z"], repeat=4):
        op = np.eye(1, dtype=complex)
        for cidx in combo:
            op = np.kron(op, np.eye(2, dtype=complex) if cidx == "i" else ops.pauli(cidx))
        coeff = np.trace(op @ h) / 16.0
        if abs(coeff) > 2e-3:
            labels["".join(combo)] = float(np.real(coeff))
    return labels

print("=== per-gate error generators (ideal limit), coefficients in rad ===")
for j in (1, 2, 3):
    u = pulses.realized_propagator(plans[j], cfg, pulses.ErrorModel())
    ideal = gates.q_gate(gates.GateSpec(j, "x", math.pi / 2), layout)
    errs = pauli_decompose_error(u, ideal)
    print(f"gate {j}: fidelity={ops.process_fidelity(u, ideal):.6f}")
    for k, v in sorted(errs.items(), key=lambda kv: -abs(kv[1])):
        print(f"    {k}: {v:+.5f}")

print("\n=== conditional phases seen by every nucleus during each gate ===")
for j in (1, 2, 3):
    u = pulses.realized_propagator(plans[j], cfg, pulses.ErrorModel())
    row = [pulses.conditional_phase(u, t, 3) for t in (1, 2, 3)]
    print(f"gate {j}: phases = {[f'{p:+.5f}' for p in row]}")

print("\n=== composition check: realized sections + ideal central rotations ===")
recipe = gates.RecipeSpec(
    gates=tuple(gates.GateSpec(j, "x", math.pi / 2) for j in (1, 2, 3)),
    central_phase=math.pi / 4,
)
psi0 = ops.kron_all([ops.eigenket("y", 1)] + [ops.eigenket("z", -1)] * 3)
ghz = (ops.kron_all([ops.eigenket("z", -1)] * 3) + 1j * ops.kron_all([ops.eigenket("z", 1)] * 3)) / np.sqrt(2)
target = np.kron(ops.eigenket("y", 1), ghz)

u_gates = {j: pulses.realized_propagator(plans[j], cfg, pulses.ErrorModel()) for j in (1, 2, 3)}
x_c = gates.electron_rotation(2 * (math.pi / 4) + math.pi, 0.0, layout)
x_pi = gates.electron_rotation(math.pi, 0.0, layout)

u_mixed = u_gates[1] @ u_gates[2] @ u_gates[3] @ x_c @ u_gates[1] @ u_gates[2] @ u_gates[3] @ x_pi
print(f"realized gates + algebraic rotations: GHZ fid = {ops.state_fidelity(u_mixed @ psi0, target):.6f}")

u_idgates_realrot = None
q = {j: gates.q_gate(gates.GateSpec(j, "x", math.pi / 2), layout) for j in (1, 2, 3)}
# central pulses realized, gates ideal
err0 = pulses.ErrorModel()
xc_plan = pulses.SequencePlan((pulses.PulseEvent(0.0, 1.5 * cfg.t_pi, math.pi),))
xpi_plan = pulses.SequencePlan((pulses.PulseEvent(0.0, cfg.t_pi, math.pi),))
xc_real = pulses.realized_propagator(xc_plan, cfg, err0)
xpi_real = pulses.realized_propagator(xpi_plan, cfg, err0)
print(f"central-pulse realized vs algebra: Xc fid = {ops.process_fidelity(xc_real, x_c):.8f}, "
      f"Xpi fid = {ops.process_fidelity(xpi_real, x_pi):.8f}")
u_mixed2 = q[1] @ q[2] @ q[3] @ xc_real @ q[1] @ q[2] @ q[3] @ xpi_real
print(f"ideal gates + realized rotations: GHZ fid = {ops.state_fidelity(u_mixed2 @ psi0, target):.6f}")

print("\n=== full pulse-level recipe, stepwise ===")
sched = pulses.recipe_schedule(recipe, [plans[j] for j in (1, 2, 3)], cfg)
u_full = pulses.realized_propagator(sched, cfg, pulses.ErrorModel())
print(f"full realized: GHZ fid = {ops.state_fidelity(u_full @ psi0, target):.6f}")
u_ideal = gates.compose_recipe(recipe, layout)
print(f"process fidelity full vs ideal recipe = {ops.process_fidelity(u_full, u_ideal):.6f}")
