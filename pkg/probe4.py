"""Error budget for the GHZ benchmark."""
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

def fid(err):
    psi = pulses.simulate(sched, cfg, err, initial=psi0)
    return ops.state_fidelity(psi, target)

print(f"no errors          : {fid(pulses.ErrorModel()):.6f}")
print(f"eps=1% only        : {fid(pulses.ErrorModel(rabi_error=0.01)):.6f}")
print(f"detuning only      : {fid(pulses.ErrorModel(detuning_on=True)):.6f}")
print(f"eps+detuning       : {fid(pulses.ErrorModel(rabi_error=0.01, detuning_on=True)):.6f}")
print(f"eps=-1%+detuning   : {fid(pulses.ErrorModel(rabi_error=-0.01, detuning_on=True)):.6f}")

# electron-only diagnostics: reduced electron state after the run
err = pulses.ErrorModel(rabi_error=0.01, detuning_on=True)
psi = pulses.simulate(sched, cfg, err, initial=psi0)
rho_e = ops.partial_trace(np.outer(psi, psi.conj()), [0], layout)
yplus = ops.eigenket("y", 1)
print(f"electron purity = {np.real(np.trace(rho_e @ rho_e)):.6f}, "
      f"<y+|rho|y+> = {np.real(yplus.conj() @ rho_e @ yplus):.6f}")
rho_n = ops.partial_trace(np.outer(psi, psi.conj()), [1, 2, 3], layout)
print(f"nuclear GHZ overlap (electron traced) = {np.real(ghz.conj() @ rho_n @ ghz):.6f}")
