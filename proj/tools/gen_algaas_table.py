#!/usr/bin/env python3
"""Regenerate data/algaas_x018.txt.

Below-gap index from the modified single-effective-oscillator model of
Afromowitz (Solid State Commun. 15, 59 (1974)) for Al(x)Ga(1-x)As, x = 0.18.
The oscillator has a logarithmic singularity at the direct gap (~747 nm), so
for wavelengths below 770 nm the real index is continued with a quadratic
fit in photon energy over 770-820 nm. The extinction coefficient is zero at
and above 730 nm and rises linearly to 0.1 at 700 nm.
"""
import numpy as np

X = 0.18
E0 = 3.65 + 0.871 * X + 0.179 * X * X
ED = 36.1 - 2.45 * X
EG = 1.424 + 1.266 * X + 0.26 * X * X
HC = 1239.841984  # eV nm


def afromowitz(lam_nm):
    e = HC / lam_nm
    eta = np.pi * ED / (2 * E0 ** 3 * (E0 ** 2 - EG ** 2))
    ef2 = 2 * E0 ** 2 - EG ** 2
    eps = (1 + ED / E0 + ED * e ** 2 / E0 ** 3
           + eta * e ** 4 / np.pi * np.log((ef2 - e ** 2) / (EG ** 2 - e ** 2)))
    return np.sqrt(eps)


def main():
    lams = np.concatenate([np.arange(700, 900, 5.0), np.arange(900, 2001, 10.0)])
    fit_l = np.arange(770, 821, 5.0)
    coeffs = np.polyfit(HC / fit_l, afromowitz(fit_l), 2)
    rows = []
    for lam in lams:
        n = afromowitz(lam) if lam >= 770 else np.polyval(coeffs, HC / lam)
        k = 0.0 if lam >= 730 else 0.1 * (730 - lam) / 30
        rows.append((lam, n, k))
    with open("data/algaas_x018.txt", "w") as f:
        f.write("# Al0.18Ga0.82As complex refractive index, generated by tools/gen_algaas_table.py\n")
        f.write("# Afromowitz single-oscillator fit above 770 nm; quadratic-in-energy continuation below.\n")
        f.write("# Stand-in table: absorption set to zero for wavelengths >= 730 nm.\n")
        f.write("# wavelength_nm n_real n_imag\n")
        for lam, n, k in rows:
            f.write(f"{lam:.1f} {n:.6f} {k:.6f}\n")


if __name__ == "__main__":
    main()
