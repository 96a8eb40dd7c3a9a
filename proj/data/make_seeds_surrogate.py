"""Regenerates data/seeds_surrogate.csv.

A 210 x 7 stand-in with the column schema of the UCI wheat-seeds table
(three varieties, 70 kernels each). Kernel length/width are drawn per
variety, area and perimeter follow from kernel geometry, so the columns
carry the same kind of cross-attribute structure as the measured data.
"""
import numpy as np

VARIETIES = [
    # length, width, compactness, asymmetry, groove  (mean, sd)
    dict(L=(5.51, 0.23), W=(3.24, 0.18), C=(0.880, 0.016), A=(2.67, 1.17), G=(5.09, 0.26)),
    dict(L=(6.15, 0.27), W=(3.68, 0.19), C=(0.884, 0.016), A=(3.64, 1.18), G=(6.02, 0.25)),
    dict(L=(5.23, 0.14), W=(2.85, 0.15), C=(0.849, 0.022), A=(4.79, 1.34), G=(5.12, 0.16)),
]


def main():
    rng = np.random.default_rng(20100)
    rows = []
    for v in VARIETIES:
        for _ in range(70):
            z = rng.standard_normal()
            length = v["L"][0] + v["L"][1] * z
            width = v["W"][0] + v["W"][1] * (0.7 * z + 0.71 * rng.standard_normal())
            compact = v["C"][0] + v["C"][1] * rng.standard_normal()
            area = 0.80 * length * width * (1.0 + 0.02 * rng.standard_normal())
            perimeter = np.sqrt(4.0 * np.pi * area / compact)
            asym = max(0.6, v["A"][0] + v["A"][1] * rng.standard_normal())
            groove = v["G"][0] + v["G"][1] * (0.8 * z + 0.6 * rng.standard_normal())
            rows.append((area, perimeter, 4.0 * np.pi * area / perimeter**2,
                         length, width, asym, groove))
    with open("seeds_surrogate.csv", "w") as f:
        f.write("area,perimeter,compactness,kernel_length,kernel_width,"
                "asymmetry,groove_length\n")
        for r in rows:
            f.write("%.2f,%.2f,%.4f,%.3f,%.3f,%.3f,%.3f\n" % r)


if __name__ == "__main__":
    main()
