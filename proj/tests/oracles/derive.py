"""Reference values frozen into the C++ tests, computed in 40-digit arithmetic.

Run: python3 tests/oracles/derive.py
"""
from mpmath import mp, mpf, mpc, sqrt, tanh, arg, pi, degrees

mp.dps = 40
F = mpf("96485.33212")
R = mpf("8.314462618")

# Grouped parameters of the LCO cell.
tau_m = mpf("12.5e-6") ** 2 / mpf("5.5e-14")
tau_p = mpf("8.5e-6") ** 2 / mpf("1.0e-11")
A = mpf("0.0982")
q_m = mpf("0.4382") * mpf("73.5e-6") * 30555 * F * A
q_p = -mpf("0.3") * mpf("70.0e-6") * 51555 * F * A
tk_m = mpf("12.5e-6") / (2 * mpf("1.764e-11") * sqrt(1000))
tk_p = mpf("8.5e-6") / (2 * mpf("6.667e-11") * sqrt(1000))
print("tau_d_minus", mp.nstr(tau_m, 17))
print("tau_d_plus ", mp.nstr(tau_p, 17))
print("q_th_minus ", mp.nstr(q_m, 17))
print("q_th_plus  ", mp.nstr(q_p, 17))
print("tau_k_minus", mp.nstr(tk_m, 17))
print("tau_k_plus ", mp.nstr(tk_p, 17))

# R_ct with theta3 = 0, theta6 = 1, x- = 0.5 at 298.15 K.
scale = 2 * R * mpf("298.15") / F
print("2RT/F(298.15)", mp.nstr(scale, 17))
print("r_ct example ", mp.nstr(-scale * (0 - 1 / sqrt(mpf("0.25"))), 17))


def f(s, tau):
    tau = mpf(tau)
    x = sqrt(s * tau)
    t = tanh(x)
    return tau / 3 * t / (t - x)


print("f(1,1)", mp.nstr(f(mpf(1), mpf(1)), 17))
h = f(mpc(0, 1), tau_p) / q_p
print("H_d cathode at s=i", mp.nstr(h.real, 17), mp.nstr(h.imag, 17))

# f + 1/s at |s tau| = 1e-9 against -tau/15.
s = mpc(0, mpf("1e-9"))
print("f+1/s at s tau = 1e-9 i (tau=1)", mp.nstr(f(s, 1) + 1 / s, 17))

# Phase of the diffusion part for a single electrode, in degrees.
for wt in [1, 10, 30, 100, 1000, 10000]:
    v = -f(mpc(0, wt), mpf(1))
    print("arg(-f) at omega tau =", wt, mp.nstr(degrees(arg(v)), 8))

# |Re f| / |Im f| - 1 approaches zero like 1/sqrt(omega tau / 2)
for wt in (mpf(10) ** 4, 2 * mpf(10) ** 4, mpf(10) ** 5):
    v = f(mpc(0, wt), 1)
    print("re/im - 1 at omega tau =", mp.nstr(wt, 6), mp.nstr(abs(v.real) / abs(v.imag) - 1, 12))
