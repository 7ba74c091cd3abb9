"""Counter-based random number streams.

Every stochastic operation takes an explicit :class:`RngStream`. A stream is
the pair (master_seed, stream_id), mapped onto a Philox counter-based bit
generator keyed by exactly that pair, so

* the same pair always reproduces the same draw sequence, and
* distinct pairs give statistically independent sequences.

Parallel work inside one operation is split into *blocks*; block ``i`` draws
from the same key but from counter region ``i`` (a Philox jump of ``i`` times
2**128 draws). Results therefore do not depend on how blocks are assigned to
workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1

# Counter regions above this index are reserved for auxiliary draws
# (bootstrap resampling, scenery refreshes) so they never collide with
# sample blocks.
AUX_REGION = 1 << 40


@dataclass(frozen=True)
class RngStream:
    """Identifier of one reproducible random stream."""

    master_seed: int
    stream_id: int = 0

    def _key(self) -> np.ndarray:
        return np.array(
            [self.master_seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )

    def generator(self) -> np.random.Generator:
        """Generator positioned at the start of the stream."""
        return np.random.Generator(np.random.Philox(key=self._key()))

    def block(self, index: int) -> np.random.Generator:
        """Generator for counter region ``index`` of this stream.

        Regions are disjoint for distinct indices, so per-block results are
        independent of worker scheduling.
        """
        if index < 0:
            raise ValueError("block index must be >= 0")
        bg = np.random.Philox(key=self._key())
        return np.random.Generator(bg.jumped(index)) if index else np.random.Generator(bg)

    def aux(self, slot: int = 0) -> np.random.Generator:
        """Generator for auxiliary draws, outside all sample blocks."""
        return self.block(AUX_REGION + slot)

    def child(self, tag: int) -> "RngStream":
        """Derived stream for a sub-task that needs its own block space."""
        return RngStream(self.master_seed, (self.stream_id * 1_000_003 + 1 + tag) & _MASK64)
