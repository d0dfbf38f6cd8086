"""Regenerates the representative fiber profile tables in crates/core/data.

The curves are smooth SSMF-like stand-ins, not measurements. Loss follows a
Rayleigh + infrared-absorption shape, the effective area is linear in
wavelength, and the Raman gain is an odd sum of Gaussian modes normalised to
a 13.2 THz peak of 3.6e-4 1/(W m) at a 205 THz pump.
"""
import math
import pathlib

C = 299792458.0
OUT = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "data"


def loss_db_per_km(f_hz):
    lam_um = C / f_hz * 1e6
    rayleigh = 0.80 / lam_um**4
    infrared = 6.0e11 * math.exp(-48.48 / lam_um)
    return rayleigh + infrared + 0.045


def aeff_m2(f_hz):
    lam_nm = C / f_hz * 1e9
    return (80.0 + 0.065 * (lam_nm - 1550.0)) * 1e-12


MODES = [
    (13.2, 2.5, 1.00),
    (14.8, 1.5, 0.35),
    (10.0, 3.5, 0.45),
    (5.0, 3.0, 0.20),
    (18.0, 1.2, 0.10),
    (24.5, 1.5, 0.04),
]


def raman_shape(df_thz):
    return sum(
        a * (math.exp(-(((df_thz - c) / w) ** 2)) - math.exp(-(((df_thz + c) / w) ** 2)))
        for c, w, a in MODES
    )


def main():
    freqs = [180e12 + k * 0.1e12 for k in range(301)]
    with open(OUT / "ssmf_loss.csv", "w") as fh:
        fh.write("frequency_hz,loss_db_per_km\n")
        for f in freqs:
            fh.write(f"{f:.6e},{loss_db_per_km(f):.6f}\n")
    with open(OUT / "ssmf_aeff.csv", "w") as fh:
        fh.write("frequency_hz,aeff_m2\n")
        for f in freqs:
            fh.write(f"{f:.6e},{aeff_m2(f):.6e}\n")
    dfs = [k * 0.1 for k in range(301)]
    peak = max(raman_shape(d) for d in dfs)
    with open(OUT / "ssmf_raman.csv", "w") as fh:
        fh.write("delta_f_hz,c_r_per_w_m\n")
        for d in dfs:
            fh.write(f"{d * 1e12:.6e},{3.6e-4 * raman_shape(d) / peak:.6e}\n")


if __name__ == "__main__":
    main()
