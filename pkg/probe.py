"""Scratch probe: synthesis realism + gate quality on the benchmark register."""
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

harmonics = {1: 11, 2: 17, 3: 17}

print("=== per-nucleus frame data ===")
for j in (1, 2, 3):
    fv = reg.effective_nuclear_frequency(cfg, j)
    aperp, _ = reg.perpendicular_hyperfine(cfg, j)
    tau = pulses.resonance_period(cfg, j, harmonics[j])
    print(f"nucleus {j}: |w|/2pi={fv.magnitude/TWO_PI/1e6:.6f} MHz  aperp/2pi={aperp/TWO_PI/1e3:.3f} kHz"
          f"  tau={tau*1e9:.3f} ns  block={8*tau*1e6:.4f} us")

print("\n=== tuning ===")
plans = {}
for j in (1, 2, 3):
    t0 = time.time()
    plan = pulses.tune_sequence(cfg, j, harmonics[j])
    dt = time.time() - t0
    s = plan.gate_sections[0]
    f = pulses.fourier_coefficient(plan, s.harmonic)
    print(f"gate {j}: blocks={s.repetitions} pulses={plan.pulse_count} "
          f"duration={plan.duration*1e6:.2f} us achieved={s.achieved_phase:.8f} "
          f"f_k={f:+.5f} t1/tau={s.t1/s.tau:.4f} t2/tau={s.t2/s.tau:.4f}  [{dt:.2f} s]")
    plans[j] = plan

print("\n=== ideal-limit gate fidelity vs q_gate ===")
layout = cfg.layout
for j in (1, 2, 3):
    u = pulses.realized_propagator(plans[j], cfg, pulses.ErrorModel())
    ideal = gates.q_gate(gates.GateSpec(j, "x", math.pi / 2), layout)
    fid = ops.process_fidelity(u, ideal)
    print(f"gate {j}: process fidelity = {fid:.6f}  unitarity defect = {ops.unitarity_defect(u):.2e}")

print("\n=== recipe / GHZ ===")
recipe = gates.RecipeSpec(
    gates=tuple(gates.GateSpec(j, "x", math.pi / 2) for j in (1, 2, 3)),
    central_phase=math.pi / 4,
)
sched = pulses.recipe_schedule(recipe, [plans[j] for j in (1, 2, 3)], cfg)
print(f"recipe pulses = {sched.pulse_count}, duration = {sched.duration*1e6:.2f} us")

psi0 = ops.kron_all([ops.eigenket("y", 1)] + [ops.eigenket("z", -1)] * 3)
ghz = (ops.kron_all([ops.eigenket("z", -1)] * 3) + 1j * ops.kron_all([ops.eigenket("z", 1)] * 3)) / np.sqrt(2)
target = np.kron(ops.eigenket("y", 1), ghz)

t0 = time.time()
psi_ideal_limit = pulses.simulate(sched, cfg, pulses.ErrorModel(), initial=psi0)
print(f"ideal-limit GHZ fidelity = {ops.state_fidelity(psi_ideal_limit, target):.6f}  [{time.time()-t0:.2f} s]")

t0 = time.time()
err = pulses.ErrorModel(rabi_error=0.01, detuning_on=True)
psi_err = pulses.simulate(sched, cfg, err, initial=psi0)
print(f"paper-error GHZ fidelity = {ops.state_fidelity(psi_err, target):.6f}  [{time.time()-t0:.2f} s]")

# also sanity: ideal algebra target
u_ideal = gates.compose_recipe(recipe, layout)
psi_alg = u_ideal @ psi0
print(f"algebra GHZ fidelity (must be 1) = {ops.state_fidelity(psi_alg, target):.8f}")
