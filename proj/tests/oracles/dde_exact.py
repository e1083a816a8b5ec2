"""Exact solution of the rotating-frame delay equations by Laplace series.

Y' = A Y + B Y(t - tau), Y = 0 for t < 0, Y(0) = Y0 has the Laplace image
R (B R)^m Y0 summed over m with shifts e^{-m s tau}, R = (s - A)^{-1}. In the
eigenbasis of A each product of resolvents is a sum of
(s - l1)^{-a} (s - l2)^{-b}, inverted with the confluent hypergeometric
function. Run at high precision to beat the cancellation at large t.

Usage: python3 dde_exact.py  (prints the frozen reference table)
"""

import mpmath as mp

mp.mp.dps = 80


def inv_laplace(l1, l2, a, b, s):
    if a == 0:
        return s ** (b - 1) / mp.factorial(b - 1) * mp.exp(l2 * s)
    if b == 0:
        return s ** (a - 1) / mp.factorial(a - 1) * mp.exp(l1 * s)
    n = a + b
    return s ** (n - 1) / mp.factorial(n - 1) * mp.exp(l2 * s) * mp.hyp1f1(a, n, (l1 - l2) * s)


def solve(gamma_total, gamma_coll, tau, omega_e, g_n, delta, u_e0, u_s0, t):
    A = mp.matrix([[-gamma_total / 2, -1j * g_n], [-1j * g_n, 1j * delta]])
    b = -(gamma_coll / 2) * mp.exp(1j * omega_e * tau)
    B = mp.matrix([[b, 0], [0, 0]])
    ev, V = mp.eig(A)
    Vi = mp.inverse(V)
    E = []
    for i in range(2):
        P = mp.matrix(2, 2)
        for r in range(2):
            for c in range(2):
                P[r, c] = V[r, i] * Vi[i, c]
        E.append(P)
    l1, l2 = ev[0], ev[1]
    y0 = mp.matrix([[u_e0], [u_s0]])
    m_max = int(mp.floor(t / tau)) if tau > 0 else 0
    total = mp.matrix([[0], [0]])
    P = {1: E[0], 0: E[1]}
    for m in range(m_max + 1):
        s = t - m * tau
        if s < 0:
            break
        for a, Pa in P.items():
            total += (Pa * y0) * inv_laplace(l1, l2, a, m + 1 - a, s)
        nxt = {}
        for a, Pa in P.items():
            for k, Ek in ((1, E[0]), (0, E[1])):
                key = a + k
                term = Pa * B * Ek
                nxt[key] = nxt[key] + term if key in nxt else term
        P = nxt
    return complex(total[0]), complex(total[1])


CASES = [
    # name, Gamma, gamma, tau, omega_e, g_n, delta, u_e0, u_s0, times
    ("generic", 1.0, 0.6, 1.0, 200.3, 1.7, 0.4, 0.8, 0.6j, [0.5, 1.0, 2.5, 4.0, 7.25]),
    ("double_bic", 1.0, 1.0, 1.0, 202 * mp.pi, mp.pi, 0.0, 1.0, 0.0, [1.5, 3.0, 10.0, 20.0]),
    ("anti_phase", 1.0, -1.0, 0.5, 64 * mp.pi, 2.0, -1.0, 0.6, 0.8, [0.75, 2.0, 5.0]),
]

if __name__ == "__main__":
    for name, G, gc, tau, we, gn, de, ue, us, times in CASES:
        for t in times:
            e, s = solve(G, gc, tau, we, gn, de, ue, us, mp.mpf(t))
            print(f'{{"{name}", {float(t)!r}, {{{e.real!r}, {e.imag!r}}}, {{{s.real!r}, {s.imag!r}}}}},')
