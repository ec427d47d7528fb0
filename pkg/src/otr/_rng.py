"""Per-task random streams.

Every stream is keyed by ``(seed, *path)`` through :class:`numpy.random.SeedSequence`
spawn keys, so a task's draws never depend on which worker runs it or in what
order tasks complete.
"""

import numpy as np

# spawn-key namespaces
DATA = 0
BOOT = 1
EVAL = 2
TRUTH = 3


def stream(seed, *path):
    ss = np.random.SeedSequence(entropy=int(seed) % 2**64, spawn_key=tuple(int(k) for k in path))
    return np.random.Generator(np.random.PCG64(ss))
