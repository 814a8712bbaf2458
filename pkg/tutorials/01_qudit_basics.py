# Qudit building blocks: Weyl operators, the two bases, Bell states, channels.

import numpy as np

from lm05.channels import make_channel, two_way_action
from lm05.qudit import (
    basis_matrix,
    bell_basis,
    partial_trace,
    projector,
    von_neumann_entropy,
    weyl_u,
)

d = 3

# U_xy shifts by x and applies the phase w^(l y)
U = weyl_u(d, 1, 2)
print(np.round(U, 3))

# the computational and Fourier bases are mutually unbiased
F = basis_matrix(d, "fourier")
print("overlaps |<k|j~>|^2:", np.round(np.abs(F) ** 2, 4)[0])

# Bell basis is unitary; each Bell state is maximally entangled
B = bell_basis(d)
print("Bell basis unitary:", np.allclose(B.conj().T @ B, np.eye(d * d)))
rho = projector(B[:, 5])
print("entanglement entropy:", von_neumann_entropy(partial_trace(rho, [d, d], 0)), "= log2 3")

# encoding a computational state shifts it; Fourier states pick up a shift in y
ket = basis_matrix(d, "computational")[:, 0]
print("U_12 |0> =", np.round(U @ ket, 3))

# the three noise models used throughout
for kind in ("depolarizing", "dit-phase-flip", "amplitude-damping"):
    ch = make_channel(kind, d, 0.2)
    print(f"{kind:18s} {len(ch.kraus):2d} Kraus ops, trace preserving {ch.is_trace_preserving()}")

# a noisy round trip: forward channel, U_11, backward channel
rho0 = projector(F[:, 0])
out = two_way_action("dep", "ind", d, 0.2, (1, 1), rho0)
print("Bob's Fourier-basis statistics:", np.round(np.real(np.diag(F.conj().T @ out @ F)), 4))
