"""Regenerate the figure scenario files in this directory (one curve per file)."""

import json
from pathlib import Path

HERE = Path(__file__).resolve().parent
WEAK2, STRONG2 = [1, 0.5], [6, 4]
WEAK4, STRONG4 = [0.5, 0.25, 0.25, 0], [8, 7, 6, 6]


def tag(k):
    return "-".join(f"{v:g}" for v in k)


def write(name, mrc, m, label):
    doc = {"label": label, "mrc": mrc, "m": m, "precision_bits": 512, "seed": 20170501}
    (HERE / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


def main():
    for rho in (0.1, 0.5, 0.9):
        for k, m1, m2 in ((WEAK2, 40, 50), (STRONG2, 100, 150)):
            base = {"P": 2, "k": k, "rho": rho, "M": 4, "gamma_th_db": 0}
            write(f"fig1_k{tag(k)}_rho{rho}", {**base, "gamma_bar_db": [-10, 0, 1]}, m1,
                  "complementary outage, low SNR")
            write(f"fig2_k{tag(k)}_rho{rho}", {**base, "gamma_bar_db": [0, 30, 2]}, m2,
                  "outage, high SNR")
        for k, m in ((WEAK4, 40), (STRONG4, 200)):
            base = {"P": 4, "k": k, "rho": rho, "M": 4, "gamma_th_db": 0, "gamma_bar_db": [0, 40, 2]}
            write(f"fig3_k{tag(k)}_rho{rho}", base, m, "outage, P=4")
        for k, m in ((WEAK4, 40), (STRONG4, 150)):
            base = {"P": 4, "k": k, "rho": rho, "M": 16, "gamma_th_db": 0, "gamma_bar_db": [0, 30, 2]}
            write(f"fig5_k{tag(k)}_rho{rho}", base, m, "16-QAM BER")
    for rho in (0.1, 0.9):
        for k, m in ((WEAK4, 40), ([2, 1.5, 1, 1], 80), ([4, 3, 2, 2], 120), (STRONG4, 200)):
            base = {"P": 4, "k": k, "rho": rho, "M": 4, "gamma_th_db": 0, "gamma_bar_db": [0, 40, 2]}
            write(f"fig4_k{tag(k)}_rho{rho}", base, m, "outage versus LoS strength")
    for M in (4, 16, 64):
        for k, m in ((WEAK4, 50), (STRONG4, 150)):
            base = {"P": 4, "k": k, "rho": 0.5, "M": M, "gamma_th_db": 0, "gamma_bar_db": [0, 30, 2]}
            write(f"fig6_M{M}_k{tag(k)}", base, m, f"{M}-QAM BER")
    for P, k, rho in ((2, WEAK2, 0.5), (2, STRONG2, 0.9), (4, WEAK4, 0.5), (4, STRONG4, 0.1), (4, STRONG4, 0.9)):
        doc = {"label": "normalized MSE versus m", "seed": 20170501,
               "mrc": {"P": P, "k": k, "rho": rho, "M": 4}}
        (HERE / f"fig7_k{tag(k)}_rho{rho}.json").write_text(json.dumps(doc, indent=2) + "\n")

    forms = {
        "unit_exponential": {"A": [[1]], "L": [[1]], "v_bar": [[0, 0]]},
        "laplace": {"A": [[1, 0], [0, -1]], "L": [[1, 0], [0, 1]], "v_bar": [[0, 0], [0, 0]]},
        "indefinite_noncentral": {
            "A": [[2, [0.5, -0.25]], [[0.5, 0.25], -1]],
            "L": [[1, [0.3, 0.1]], [[0.3, -0.1], 0.8]],
            "v_bar": [[1, 0.5], [-0.5, 1]],
        },
    }
    for name, form in forms.items():
        doc = {"label": name, "form": form, "m": 40, "precision_bits": 512}
        (HERE / "forms" / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
