"""Write coefficient surfaces for plotting as CSV files.

Each surface is the output of ``qdc grid`` for one family:

    python3 scripts/surfaces.py --outdir surfaces
"""

import argparse
from pathlib import Path

from quantdep import cli

SURFACES = {
    "shuffle3": ["--family", "shuffle3", "--resolution", "30", "--method", "volume"],
    "mix-two-thirds": ["--family", "mix", "--params",
                       "omega=0.6666666666666666,left=frechet-upper,right=frechet-lower",
                       "--resolution", "20"],
    "archimedean-ex8": ["--family", "archimedean-ex8", "--params", "theta=0.5",
                        "--resolution", "40", "--method", "volume"],
    "cuadras-auge": ["--family", "cuadras-auge", "--params", "theta=0.5", "--resolution", "20"],
    # volume limits at the (0, 0) corner decay like t^0.4 here; use the closed form
    "ev-flat": ["--family", "ev-flat", "--params", "theta=0.7", "--resolution", "20"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="surfaces")
    ap.add_argument("--only", nargs="*", choices=sorted(SURFACES))
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.only or SURFACES:
        path = out / f"{name}.csv"
        code = cli.main(["grid", *SURFACES[name], "--out", str(path)])
        nonzero = sum(1 for line in path.read_text().splitlines()[1:] if float(line.split(",")[2]) > 1e-9)
        print(f"{name:16s} -> {path} (exit {code}, {nonzero} nonzero cells)")


if __name__ == "__main__":
    main()
