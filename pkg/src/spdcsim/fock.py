"""Sparse algebra over multi-mode bosonic occupation states.

A state is a superposition of occupation patterns over ``(path, mode)``
labels, stored as a mapping from a canonically ordered occupation tuple
to a complex amplitude.  Amplitudes use the normalized number-state
convention, so raising and lowering carry the usual square-root factors:
raising an occupation ``n`` multiplies the amplitude by ``sqrt(n + 1)``,
lowering by ``sqrt(n)``.
"""

from __future__ import annotations

import math
from typing import Iterator, Mapping, NamedTuple

#: Amplitudes at or below this magnitude are dropped from sparse states.
PRUNE_EPSILON = 1e-14

#: Paths reserved for undetected beams split off by misalignment elements.
LOSS_PREFIX = "loss#"


class ModeLabel(NamedTuple):
    """One bosonic mode: a beam path plus an integer internal mode.

    Polarization is encoded as mode 0 (horizontal) and 1 (vertical);
    orbital angular momentum uses the integer value directly, negative
    values included.
    """

    path: str
    mode: int

    def is_loss(self) -> bool:
        return self.path.startswith(LOSS_PREFIX)

    def text(self) -> str:
        return f"{self.path}:{self.mode}"


def loss_path(index: int) -> str:
    """Name of the ``index``-th loss path."""
    return f"{LOSS_PREFIX}{index}"


#: Canonical occupation pattern: sorted ``((label, count), ...)`` with
#: every count >= 1.  The empty tuple is the vacuum pattern.
Occupation = tuple[tuple[ModeLabel, int], ...]


def make_occupation(counts: Mapping[ModeLabel, int]) -> Occupation:
    """Build a canonical occupation tuple, dropping zero entries."""
    items = [(label, n) for label, n in counts.items() if n != 0]
    for label, n in items:
        if n < 0:
            raise ValueError(f"negative occupation {n} at {label.text()}")
    return tuple(sorted(items))


def occupation_photons(occ: Occupation, *, include_loss: bool = True) -> int:
    """Total photon count of a pattern, optionally ignoring loss paths."""
    return sum(n for label, n in occ if include_loss or not label.is_loss())


class StateVector:
    """Sparse superposition of occupation patterns with complex amplitudes.

    Value semantics: every operation returns a new state, inputs are
    never mutated.  Terms with amplitude magnitude at or below
    ``PRUNE_EPSILON`` are dropped on construction.
    """

    __slots__ = ("terms", "pair_order")

    def __init__(
        self,
        terms: Mapping[Occupation, complex] | None = None,
        *,
        pair_order: int | None = None,
    ):
        cleaned: dict[Occupation, complex] = {}
        if terms:
            for occ, amp in terms.items():
                amp = complex(amp)
                if abs(amp) > PRUNE_EPSILON:
                    cleaned[occ] = amp
        self.terms = cleaned
        self.pair_order = pair_order

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls) -> "StateVector":
        return cls()

    @classmethod
    def from_occupations(cls, counts: Mapping[ModeLabel, int], amplitude: complex = 1.0) -> "StateVector":
        """Single-term state for the given occupations."""
        return cls({make_occupation(counts): complex(amplitude)})

    # -- basic queries ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def amplitude(self, counts: Mapping[ModeLabel, int]) -> complex:
        """Amplitude of one occupation pattern (0 if absent)."""
        return self.terms.get(make_occupation(counts), 0j)

    def paths(self) -> set[str]:
        return {label.path for occ in self.terms for label, _ in occ}

    def __iter__(self) -> Iterator[tuple[Occupation, complex]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "StateVector(0)"
        parts = []
        for occ, amp in sorted(self.terms.items()):
            occ_text = " ".join(f"{n}*{label.text()}" for label, n in occ) or "vac"
            parts.append(f"({amp:.6g})|{occ_text}>")
        return "StateVector(" + " + ".join(parts) + ")"

    # -- linear structure --------------------------------------------------

    def __add__(self, other: "StateVector") -> "StateVector":
        if not isinstance(other, StateVector):
            return NotImplemented
        merged = dict(self.terms)
        for occ, amp in other.terms.items():
            merged[occ] = merged.get(occ, 0j) + amp
        order = self.pair_order if self.pair_order == other.pair_order else None
        return StateVector(merged, pair_order=order)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + (other * -1.0)

    def __mul__(self, scalar: complex) -> "StateVector":
        if isinstance(scalar, StateVector):
            return NotImplemented
        c = complex(scalar)
        return StateVector(
            {occ: amp * c for occ, amp in self.terms.items()},
            pair_order=self.pair_order,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "StateVector":
        return self * -1.0

    # -- ladder operators -------------------------------------------------

    def create(self, label: ModeLabel) -> "StateVector":
        """Raise the occupation at ``label`` on every term."""
        out: dict[Occupation, complex] = {}
        for occ, amp in self.terms.items():
            counts = dict(occ)
            n = counts.get(label, 0)
            counts[label] = n + 1
            key = make_occupation(counts)
            out[key] = out.get(key, 0j) + amp * math.sqrt(n + 1)
        return StateVector(out)

    def annihilate(self, label: ModeLabel) -> "StateVector":
        """Lower the occupation at ``label``; terms without it vanish."""
        out: dict[Occupation, complex] = {}
        for occ, amp in self.terms.items():
            counts = dict(occ)
            n = counts.get(label, 0)
            if n == 0:
                continue
            counts[label] = n - 1
            key = make_occupation(counts)
            out[key] = out.get(key, 0j) + amp * math.sqrt(n)
        return StateVector(out)

    # -- metric ------------------------------------------------------------

    def inner(self, other: "StateVector") -> complex:
        """Hermitian inner product ``<self|other>`` in the number basis."""
        if len(self.terms) > len(other.terms):
            return other.inner(self).conjugate()
        total = 0j
        for occ, amp in self.terms.items():
            other_amp = other.terms.get(occ)
            if other_amp is not None:
                total += amp.conjugate() * other_amp
        return total

    def norm(self) -> float:
        return math.sqrt(sum(abs(amp) ** 2 for amp in self.terms.values()))

    def normalized(self) -> "StateVector":
        """Unit-norm copy; the zero state is returned unchanged."""
        n = self.norm()
        if n == 0.0:
            return StateVector.zero()
        return self * (1.0 / n)

    # -- sector selection ---------------------------------------------------

    def truncate_pairs(self, max_pairs: int) -> "StateVector":
        """Drop terms holding more than ``2 * max_pairs`` photons."""
        if max_pairs < 0:
            raise ValueError("max_pairs must be >= 0")
        limit = 2 * max_pairs
        kept = {
            occ: amp
            for occ, amp in self.terms.items()
            if occupation_photons(occ) <= limit
        }
        return StateVector(kept, pair_order=max_pairs)

    def photon_sector(self, n: int, *, include_loss: bool = True) -> "StateVector":
        """Sub-state whose terms hold exactly ``n`` photons."""
        kept = {
            occ: amp
            for occ, amp in self.terms.items()
            if occupation_photons(occ, include_loss=include_loss) == n
        }
        return StateVector(kept, pair_order=self.pair_order)

    # -- serialization -------------------------------------------------------

    def serialize(self) -> str:
        """Canonical text form, one term per line.

        Format: ``re im : n1*path:mode n2*path:mode ...`` with terms in
        canonical order.  ``repr`` floats are used so parsing the text
        reproduces the state bit for bit.
        """
        lines = []
        for occ, amp in sorted(self.terms.items()):
            occ_text = " ".join(f"{n}*{label.text()}" for label, n in occ)
            lines.append(f"{amp.real!r} {amp.imag!r} : {occ_text}".rstrip())
        return "\n".join(lines) + ("\n" if lines else "")


def vacuum() -> StateVector:
    """The vacuum state: a single empty term with amplitude 1."""
    return StateVector({(): 1.0 + 0j})


def parse_state(text: str) -> StateVector:
    """Inverse of :meth:`StateVector.serialize`."""
    terms: dict[Occupation, complex] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, tail = line.partition(":")
        fields = head.split()
        if len(fields) != 2:
            raise ValueError(f"line {line_no}: expected 're im :' prefix")
        try:
            amp = complex(float(fields[0]), float(fields[1]))
        except ValueError as exc:
            raise ValueError(f"line {line_no}: bad amplitude: {exc}") from None
        counts: dict[ModeLabel, int] = {}
        for token in tail.split():
            mult, sep, label_text = token.partition("*")
            path, sep2, mode_text = label_text.rpartition(":")
            if not sep or not sep2 or not path:
                raise ValueError(f"line {line_no}: bad occupation token {token!r}")
            try:
                count = int(mult)
                mode = int(mode_text)
            except ValueError:
                raise ValueError(f"line {line_no}: bad occupation token {token!r}") from None
            label = ModeLabel(path, mode)
            counts[label] = counts.get(label, 0) + count
        occ = make_occupation(counts)
        if occ in terms:
            raise ValueError(f"line {line_no}: duplicate occupation pattern")
        terms[occ] = amp
    return StateVector(terms)
