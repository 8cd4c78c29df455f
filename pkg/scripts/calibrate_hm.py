#!/usr/bin/env python3
"""HM score distribution of uniform-random agents on the built-in design."""

import argparse
import json

from riskchoice.design import builtin_design
from riskchoice.hm import HmMode, HmPolicy
from riskchoice.simulate import SimConfig, UniformRandom, calibrate_hm_percentile


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--agents", type=int, default=10_000)
    ap.add_argument("--rounds", type=int, default=5)
    ap.add_argument("--seed", type=int, default=13)
    ap.add_argument("--percentile", type=float, default=0.025)
    ap.add_argument("--with-deferral", action="store_true", help="let agents defer too")
    ap.add_argument("--mode", choices=[m.value for m in HmMode], default="strict")
    ap.add_argument("--policy", choices=[p.value for p in HmPolicy], default="penalize")
    args = ap.parse_args()

    cfg = SimConfig(builtin_design(), args.agents, args.rounds, args.seed)
    res = calibrate_hm_percentile(cfg, args.percentile, specs=(UniformRandom(args.with_deferral),),
                                  mode=HmMode(args.mode), policy=HmPolicy(args.policy))
    res["include_deferral"] = args.with_deferral
    print(json.dumps(res, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
