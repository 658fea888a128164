"""Distribution of the bounds over random games.

The classical min-max projection bound is far from tight: it grows like
1/sin(smallest cell angle / 2), while the decentralized game length never
exceeds the longest cell edge.
"""

import numpy as np

from tripursuit.experiments import GameSampler, montecarlo, summarize

for law in ("pursuers", "cell"):
    rows = montecarlo(2000, seed=1, sampler=GameSampler(law=law))
    print(f"sampler law {law!r}")
    for key in ("delta_lower", "game_length_over_lower_bound", "pshenichnyi_over_game_length"):
        s = summarize(rows, key)
        print(f"  {key:<32s} min {s['min']:8.4f}  median {s['median']:8.4f}  max {s['max']:10.4f}")
    bad = sum(bool(r["_violations"]) for r in rows)
    print(f"  games violating the bound chain: {bad}")
    ratio = np.array([r["pshenichnyi_over_game_length"] for r in rows])
    print(f"  share with projection bound over 10x the game length: {np.mean(ratio > 10):.3%}")
