"""
Random substreams and process-pool mapping.

Every random draw in the package comes from ``substream(seed, *keys)``: a Philox
generator keyed by a ``SeedSequence`` whose spawn key is the tuple of integer keys.
Philox is counter based, so the stream for (seed, r) does not depend on which other
streams were consumed before it, nor on which worker consumed them.
"""

import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np

logger = logging.getLogger(__name__)

# spawn-key namespaces
SERIES_STREAM = 0
BOOTSTRAP_STREAM = 1
PATH_STREAM = 2
ORACLE_STREAM = 3


def _entropy(seed):
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    return seed


def substream(seed, *keys):
    """Return a Philox generator for the substream (seed, *keys)."""
    ss = np.random.SeedSequence(_entropy(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed, *keys):
    """Derive a 64-bit integer seed for the substream (seed, *keys)."""
    ss = np.random.SeedSequence(_entropy(seed), spawn_key=tuple(int(k) for k in keys))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def as_generator(seed):
    """Accept an int seed or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return substream(seed)


def parallel_map(fn, tasks, workers=1):
    """Map ``fn`` over ``tasks`` and return results in task order.

    With ``workers > 1`` the tasks run on a process pool; ``fn`` and the tasks must be
    picklable. The result list is identical for every worker count.
    """
    tasks = list(tasks)
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]

    logger.debug("Dispatching %d tasks to %d workers", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def chunk_ranges(total, chunk):
    """Split range(total) into consecutive (start, stop) pairs of at most ``chunk``."""
    return [(start, min(start + chunk, total)) for start in range(0, total, chunk)]
