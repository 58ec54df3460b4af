"""Trace the wavelet response against scale for pure-tone phases.

For each tone frequency f the peak plane magnitude is swept over a
geometric scale grid and written as CSV; the printed summary shows the
peak scale following alpha* = sqrt(3) / (2 pi f), i.e. the inverse
scale-frequency relationship with its constant made explicit.

    python3 scripts/scale_response_curve.py --out out/scale_curve
"""

import argparse
from pathlib import Path

import numpy as np

from fringescale import cwt_plane, field_from_array


def response_curve(n: int, f: float, alphas: np.ndarray) -> np.ndarray:
    x = np.arange(n, dtype=float)
    fld = field_from_array(np.cos(2 * np.pi * f * x)[None, :].repeat(n, axis=0))
    return np.array([np.abs(cwt_plane(fld, a).values).max() for a in alphas])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/scale_curve"))
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--freqs", type=float, nargs="+",
                    default=[1 / 64, 1 / 32, 1 / 16])
    ap.add_argument("--points", type=int, default=161)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for f in args.freqs:
        predicted = np.sqrt(3.0) / (2 * np.pi * f)
        alphas = np.geomspace(predicted / 3, predicted * 3, args.points)
        resp = response_curve(args.size, f, alphas)
        astar = alphas[int(np.argmax(resp))]
        path = args.out / f"curve_f{f:g}.csv"
        with path.open("w") as fh:
            fh.write("alpha,response\n")
            fh.writelines(f"{a!r},{r!r}\n" for a, r in zip(alphas, resp))
        print(f"f={f:g}: alpha*={astar:.3f} (predicted {predicted:.3f}), "
              f"2*pi*f*alpha*={2 * np.pi * f * astar:.4f}, wrote {path}")


if __name__ == "__main__":
    main()
