# Individual attack: Eve clones both passes with ancilla overlap cos(theta).

import numpy as np

from lm05.individual import (
    detection_threshold,
    individual_curve,
    min_detection_probability,
)

thetas = np.linspace(0, np.pi / 2, 7)

# key rate per dit against Eve's detection probability
for d in (2, 3, 4, 7):
    print(f"d = {d}")
    print("  theta   P_det    I_AB    I_AE    I_BE   r_reg")
    for pt in individual_curve(d, thetas):
        mi = pt.triple
        print(f"  {pt.theta:5.3f}  {pt.pdet_min:6.4f}  {mi.I_AB:6.4f}  {mi.I_AE:6.4f}"
              f"  {mi.I_BE:6.4f}  {pt.r_reg:6.4f}")

# the strongest attack is caught with probability (d^2 - 1)/(2 d^2)
print([round(min_detection_probability(d, np.pi / 2), 4) for d in range(2, 8)])

# past this detection probability Eve knows more than Bob;
# from d = 3 on that never happens, so the range end is reported
for d in range(2, 8):
    res = detection_threshold(d)
    tag = "" if res.crossed else "  (no crossing)"
    print(f"d = {d}: threshold {res.pdet_min:.6f}{tag}")
