"""Joint-weighted linear SVM on a stream where 30% of frames have flipped labels.

    python scripts/svm_stream.py --seeds 20
"""

import argparse

import numpy as np

from decontam.experiments import StreamConfig, svm_stream_trial
from decontam.joint import JointConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--mu", type=float, default=5.0)
    ap.add_argument("--flip", type=float, default=0.3)
    args = ap.parse_args()

    stream = StreamConfig(flip_fraction=args.flip)
    print(f"{'seed':>4} {'alpha flipped':>14} {'alpha clean':>12} {'acc joint':>10} {'acc fixed':>10}")
    rows = []
    for seed in range(args.seeds):
        r = svm_stream_trial(seed, stream, JointConfig(mu=args.mu))
        rows.append(r)
        print(f"{seed:>4} {r.alpha_flipped:>14.4f} {r.alpha_clean:>12.4f} "
              f"{r.acc_joint:>10.3f} {r.acc_fixed:>10.3f}")
    print(f"median accuracy: joint {np.median([r.acc_joint for r in rows]):.3f}, "
          f"fixed {np.median([r.acc_fixed for r in rows]):.3f}")


if __name__ == "__main__":
    main()
