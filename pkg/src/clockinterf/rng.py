"""Counter-based random streams keyed by ``(seed, *key)``.

Every shot, pipeline and sweep point draws from its own Philox stream, so
results do not depend on the order in which streams are consumed.
"""

import numpy as np

# stream tags; keep stable, they are part of the reproducibility contract
SHOTS = 1
POPULATION = 2
REFERENCE = 3
PHASE_M1 = 4
PHASE_M2 = 5


def stream(seed: int, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))
