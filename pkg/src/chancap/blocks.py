"""Block-diagonal operators labelled by classical indices.

A :class:`BlockDiagonalState` is a direct sum of PSD blocks, one per tuple of
classical labels, together with one quantum factor.  It is never materialised
as a single large matrix: entropies and relative entropies decompose exactly
over the blocks, which keeps eigensolves at the size of one block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvariantViolation
from .linalg import ATOL_PSD, entropy, frozen, relative_entropy, shannon_entropy


@dataclass(frozen=True)
class BlockDiagonalState:
    """Direct sum of PSD blocks indexed by classical label tuples.

    ``axes`` names the classical factors (one letter each, e.g. ("A", "B"))
    and ``quantum_axis`` names the matrix factor.  ``labels[i]`` gives the
    classical indices of ``blocks[i]``.  Total trace must be 1.
    """

    axes: tuple[str, ...]
    quantum_axis: str
    labels: tuple[tuple[int, ...], ...]
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.blocks):
            raise DimensionMismatchError("label count differs from block count")
        blocks = []
        total = 0.0
        for lab, b in zip(self.labels, self.blocks):
            if len(lab) != len(self.axes):
                raise DimensionMismatchError(f"label {lab} does not index axes {self.axes}")
            b = np.asarray(b, dtype=complex)
            lam = np.linalg.eigvalsh(0.5 * (b + b.conj().T))
            if lam.size and lam.min() < -ATOL_PSD:
                raise InvariantViolation(
                    f"block {lab} not PSD: min eigenvalue {lam.min():.3e}"
                )
            total += np.trace(b).real
            blocks.append(frozen(b))
        if abs(total - 1.0) > 1e-9:
            raise InvariantViolation(f"blocks have total trace {total!r}, expected 1")
        object.__setattr__(self, "labels", tuple(tuple(int(i) for i in lab) for lab in self.labels))
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def block_dim(self) -> int:
        return self.blocks[0].shape[0]

    def trace_table(self) -> np.ndarray:
        """Traces of the blocks arranged as an array over the classical axes."""
        shape = tuple(max(lab[k] for lab in self.labels) + 1 for k in range(len(self.axes)))
        table = np.zeros(shape if shape else (1,))
        for lab, b in zip(self.labels, self.blocks):
            table[lab if lab else (0,)] += np.trace(b).real
        return table

    def block(self, label: tuple[int, ...]) -> np.ndarray:
        for lab, b in zip(self.labels, self.blocks):
            if lab == tuple(label):
                return b
        raise KeyError(f"no block labelled {label}")


def block_entropy(state: BlockDiagonalState) -> float:
    """Entropy of the direct sum, in bits: sum of per-block -Tr[B log2 B]."""
    return float(sum(entropy(b) for b in state.blocks))


def entropy_decomposition(state: BlockDiagonalState) -> tuple[float, float]:
    """Split the entropy into label uncertainty plus average block entropy.

    Returns (shannon entropy of the block traces, trace-weighted sum of the
    entropies of the normalised blocks); their sum equals block_entropy.
    """
    traces = np.array([np.trace(b).real for b in state.blocks])
    label_term = shannon_entropy(traces)
    cond = 0.0
    for t, b in zip(traces, state.blocks):
        if t > 1e-12:
            cond += t * entropy(b / t)
    return label_term, cond


def block_relative_entropy(p: BlockDiagonalState, q: BlockDiagonalState) -> float:
    """Relative entropy between two states with identical block structure."""
    if p.labels != q.labels:
        raise DimensionMismatchError("block label structures differ")
    total = 0.0
    for bp, bq in zip(p.blocks, q.blocks):
        if np.trace(bp).real <= 1e-12:
            continue
        total += relative_entropy(bp, bq)
    return total


def scaled_block_state(
    axes: tuple[str, ...],
    quantum_axis: str,
    weights: np.ndarray,
    matrix: np.ndarray,
) -> BlockDiagonalState:
    """Product of a classical distribution over labels with one fixed block.

    Builds the state with blocks ``weights[lab] * matrix`` -- the block form
    of P_classical (x) P_quantum used on the right side of relative-entropy
    comparisons.
    """
    weights = np.asarray(weights, dtype=float)
    labels = list(np.ndindex(*weights.shape))
    blocks = [weights[lab] * np.asarray(matrix, dtype=complex) for lab in labels]
    return BlockDiagonalState(axes, quantum_axis, tuple(labels), tuple(blocks))


def reduction(state: BlockDiagonalState, which: str):
    """Reduce onto the named factors, e.g. "AB", "A", "AQ", "Q", "BR", "R".

    Dropped classical axes are summed over; dropping the quantum axis takes
    block traces.  Returns a probability table (ndarray) if the quantum axis
    is dropped, a density-matrix-like ndarray if only the quantum axis is
    kept, and a BlockDiagonalState otherwise.
    """
    wanted = list(which)
    unknown = [w for w in wanted if w != state.quantum_axis and w not in state.axes]
    if unknown:
        raise DimensionMismatchError(
            f"reduction '{which}' names unknown factors {unknown}; "
            f"state has axes {state.axes} and quantum axis {state.quantum_axis!r}"
        )
    keep_q = state.quantum_axis in wanted
    keep_axes = [a for a in state.axes if a in wanted]
    positions = [state.axes.index(a) for a in keep_axes]

    if not keep_q:
        table = state.trace_table()
        drop = tuple(k for k, a in enumerate(state.axes) if a not in keep_axes)
        out = table.sum(axis=drop) if drop else table
        # transpose marginal axes into the requested order
        order = [sorted(positions).index(p) for p in positions]
        return out.transpose(order) if out.ndim > 1 else out

    if not keep_axes:
        total = np.zeros((state.block_dim, state.block_dim), dtype=complex)
        for b in state.blocks:
            total += b
        return total

    merged: dict[tuple[int, ...], np.ndarray] = {}
    for lab, b in zip(state.labels, state.blocks):
        key = tuple(lab[p] for p in positions)
        if key in merged:
            merged[key] = merged[key] + b
        else:
            merged[key] = b.astype(complex)
    labels = tuple(sorted(merged))
    return BlockDiagonalState(
        tuple(keep_axes), state.quantum_axis, labels, tuple(merged[k] for k in labels)
    )
