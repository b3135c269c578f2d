"""Measure Bernstein and commutator constants on the reference seeds and freeze them.

    python scripts/measure_constants.py            # print
    python scripts/measure_constants.py --write    # overwrite the packaged fixture
"""

import argparse
import json
from pathlib import Path

from emhd_lab.diagnostics import FROZEN_PATH, REFERENCE_SEEDS, empirical_constant_suite
from emhd_lab.littlewood_paley import norm_equivalence_bounds
from emhd_lab.spectral_core import GridSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--write", action="store_true")
    ap.add_argument("--grids", type=int, nargs="+", default=[64, 128])
    args = ap.parse_args()
    frozen = {}
    for n in args.grids:
        rep = empirical_constant_suite(REFERENCE_SEEDS, GridSpec(n))
        frozen[str(n)] = {k: rep[k] for k in ("bernstein_forward", "bernstein_reverse", "commutator")}
        print(n, json.dumps(frozen[str(n)], indent=2))
    # dyadic vs multiplier H^s norm interval, frozen at the smallest grid
    g0 = GridSpec(min(args.grids))
    frozen["norm_equivalence"] = {str(s): list(norm_equivalence_bounds(g0, s)) for s in (0, 1, 2, 3)}
    print("norm_equivalence", frozen["norm_equivalence"])
    if args.write:
        Path(FROZEN_PATH).write_text(json.dumps(frozen, indent=2, sort_keys=True) + "\n")
        print("wrote", FROZEN_PATH)


if __name__ == "__main__":
    main()
