"""OP and corrupted/clean weight ratio as a function of mu on the occlusion scenario.

Small mu pins the weights to the prior (fixed decay); large mu concentrates
them on the lowest-loss frames.

    python scripts/mu_sweep.py --seeds 5 --values 1e-8,0.1,1,5,20
"""

import argparse

import numpy as np

from decontam.experiments import decontamination_trial
from decontam.joint import JointConfig
from decontam.tracking import TrackerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--values", default="1e-8,0.1,1,5,20")
    args = ap.parse_args()

    print(f"{'mu':>8} {'OP joint':>9} {'OP fixed':>9} {'alpha ratio':>12}")
    for mu in (float(v) for v in args.values.split(",")):
        rs = [decontamination_trial(s, config=TrackerConfig(joint=JointConfig(mu=mu)))
              for s in range(args.seeds)]
        print(f"{mu:>8g} {np.mean([r.op_joint for r in rs]):>9.1f} "
              f"{np.mean([r.op_fixed for r in rs]):>9.1f} {np.nanmedian([r.ratio for r in rs]):>12.3f}")


if __name__ == "__main__":
    main()
