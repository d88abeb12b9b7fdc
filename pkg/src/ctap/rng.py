"""Counter-based random streams.

Every random quantity is keyed by ``(seed, stream)`` and drawn in index order,
so value ``i`` depends only on the key and ``i``, never on call order.
"""
import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_id(name: str) -> int:
    return zlib.crc32(name.encode())


def uniforms(seed: int, stream: str, count: int) -> np.ndarray:
    """``count`` uniforms in [0, 1) from the Philox stream keyed by (seed, stream)."""
    bitgen = np.random.Philox(key=[int(seed) & _MASK64, stream_id(stream)])
    return np.random.Generator(bitgen).random(count)
