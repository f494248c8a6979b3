"""Information and algorithmic complexity of word-length sequences."""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class MissingBlockWarning(UserWarning):
    """A BDM block was not found in the CTM table."""


@dataclass(frozen=True)
class SymbolSequence:
    symbols: tuple[int, ...]
    alphabet_size: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if self.alphabet_size is None:
            object.__setattr__(self, "alphabet_size", len(set(self.symbols)))

    def __len__(self):
        return len(self.symbols)


def as_sequence(seq) -> SymbolSequence:
    return seq if isinstance(seq, SymbolSequence) else SymbolSequence(tuple(seq))


def _entropy(counts: Iterable[int]) -> float:
    counts = [c for c in counts if c > 0]
    n = sum(counts)
    return max(0.0, -sum(c / n * math.log2(c / n) for c in counts))


def shannon_entropy(seq) -> float:
    s = as_sequence(seq).symbols
    if not s:
        raise ValueError("empty sequence")
    return _entropy(Counter(s).values())


def second_order_entropy(seq, circular: bool = True) -> float:
    """Joint entropy of adjacent symbol pairs ``(s_i, s_{i+1})``.

    By default the sequence wraps around, giving ``n`` pairs whose marginals
    both equal the symbol distribution, so ``H1 <= H2 <= 2 * H1`` holds exactly.
    ``circular=False`` uses the ``n - 1`` linear pairs only; for those the
    bounds can fail (``"abc"`` gives ``H2 = 1 < H1 = log2(3)``).
    """
    s = as_sequence(seq).symbols
    if len(s) < 2:
        raise ValueError("second order entropy needs at least 2 symbols")
    nxt = s[1:] + s[:1] if circular else s[1:]
    return _entropy(Counter(zip(s, nxt)).values())


def lz76_phrases(s: Sequence) -> int:
    """Number of phrases in the exhaustive-history LZ76 parsing (Kaspar-Schuster scan)."""
    n = len(s)
    if n == 0:
        raise ValueError("empty sequence")
    if n == 1:
        return 1
    c, l, i, k, k_max = 1, 1, 0, 1, 1
    while True:
        if s[i + k - 1] == s[l + k - 1]:
            k += 1
            if l + k > n:
                c += 1
                break
        else:
            k_max = max(k, k_max)
            i += 1
            if i == l:
                c += 1
                l += k_max
                if l + 1 > n:
                    break
                i, k, k_max = 0, 1, 1
            else:
                k = 1
    return c


def lz_complexity(seq) -> tuple[int, float]:
    """``(phrases, bits)`` with ``bits = phrases * log2(max(2, n))``."""
    s = as_sequence(seq).symbols
    phrases = lz76_phrases(s)
    return phrases, phrases * math.log2(max(2, len(s)))


def cap_alphabet(seq, cap: int = 9) -> SymbolSequence:
    """Delete (not clamp) every symbol greater than ``cap``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    s = as_sequence(seq)
    return SymbolSequence(tuple(x for x in s.symbols if x <= cap), cap)


@dataclass(frozen=True)
class CtmTable:
    """Lookup table of CTM complexity estimates (bits) for fixed-size blocks."""

    block_size: int
    alphabet_size: int
    entries: dict[tuple[int, ...], float]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("empty CTM table")
        for key in self.entries:
            if len(key) != self.block_size:
                raise ValueError(f"block {key} does not have {self.block_size} symbols")
        if len(self.alphabet) > self.alphabet_size:
            raise ValueError("table uses more symbols than its declared alphabet size")

    @classmethod
    def from_entries(cls, entries: Mapping[Sequence[int], float],
                     alphabet_size: int | None = None) -> "CtmTable":
        entries = {tuple(int(x) for x in k): float(v) for k, v in entries.items()}
        if not entries:
            raise ValueError("empty CTM table")
        block = len(next(iter(entries)))
        symbols = {x for k in entries for x in k}
        return cls(block, alphabet_size or len(symbols), entries)

    @property
    def alphabet(self) -> frozenset[int]:
        return frozenset(x for k in self.entries for x in k)

    @property
    def max_entry(self) -> float:
        return max(self.entries.values())


def load_ctm_table(path) -> CtmTable:
    """Read a TSV with header ``block<TAB>bits``; blocks are comma-joined symbols."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split("\t") != ["block", "bits"]:
        raise ValueError("CTM table must start with header 'block\\tbits'")
    entries = {}
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split("\t")
        if len(parts) != 2:
            raise ValueError(f"malformed CTM row on line {lineno}")
        try:
            key = tuple(int(x) for x in parts[0].split(","))
            entries[key] = float(parts[1])
        except ValueError:
            raise ValueError(f"malformed CTM row on line {lineno}") from None
    return CtmTable.from_entries(entries)


def save_ctm_table(table: CtmTable, path) -> None:
    rows = ["block\tbits"]
    for k in sorted(table.entries):
        rows.append(",".join(map(str, k)) + "\t" + repr(table.entries[k]))
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")


def bdm_blocks(seq, table: CtmTable) -> tuple[float, int]:
    """BDM value and the number of distinct blocks missing from the table."""
    s = as_sequence(seq).symbols
    extra = set(s) - table.alphabet
    if extra:
        raise ValueError(f"symbols {sorted(extra)} are not in the CTM table alphabet")
    b = table.block_size
    blocks = Counter(tuple(s[i:i + b]) for i in range(0, len(s) - b + 1, b))
    terms, missing = [], 0
    for block, mult in blocks.items():
        ctm = table.entries.get(block)
        if ctm is None:
            ctm = table.max_entry
            missing += 1
        terms += [ctm, math.log2(mult)]
    # fsum is correctly rounded, so the value does not depend on block order
    return math.fsum(terms), missing


def bdm(seq, table: CtmTable) -> float:
    """Block decomposition over non-overlapping blocks; a trailing short block is dropped.

    Blocks absent from the table are charged the table maximum and reported
    with a ``MissingBlockWarning``.
    """
    total, missing = bdm_blocks(seq, table)
    if missing:
        warnings.warn(f"{missing} distinct block(s) missing from CTM table",
                      MissingBlockWarning, stacklevel=2)
    return total


_MEASURES = ("shannon_bits", "second_order_bits", "lz_phrases", "lz_bits", "bdm_bits")


@dataclass(frozen=True)
class ComplexityReport:
    shannon_bits: float
    second_order_bits: float | None
    lz_phrases: float
    lz_bits: float
    input_length: int
    alphabet_size: int
    bdm_bits: float | None = None
    bdm_missing_blocks: int = 0
    normalized: bool = False

    def to_dict(self) -> dict:
        raw = self if not self.normalized else denormalize_report(self)
        norm = normalize_report(raw)
        out = {f.name: getattr(raw, f.name) for f in fields(raw) if f.name != "normalized"}
        out["normalized"] = {m: getattr(norm, m) for m in _MEASURES}
        return out


def _scale(r: ComplexityReport, factor: float, normalized: bool) -> ComplexityReport:
    vals = {m: (None if getattr(r, m) is None else getattr(r, m) * factor) for m in _MEASURES}
    return replace(r, normalized=normalized, **vals)


def normalize_report(r: ComplexityReport) -> ComplexityReport:
    """Divide every measure by the input length."""
    if r.input_length <= 0:
        raise ValueError("cannot normalise a report of zero input length")
    if r.normalized:
        return r
    return _scale(r, 1.0 / r.input_length, True)


def denormalize_report(r: ComplexityReport) -> ComplexityReport:
    if not r.normalized:
        return r
    return _scale(r, float(r.input_length), False)


def complexity_report(seq, table: CtmTable | None = None) -> ComplexityReport:
    s = as_sequence(seq)
    phrases, bits = lz_complexity(s)
    bdm_bits, missing = (None, 0)
    if table is not None:
        bdm_bits, missing = bdm_blocks(s, table)
    return ComplexityReport(
        shannon_bits=shannon_entropy(s),
        second_order_bits=second_order_entropy(s) if len(s) >= 2 else None,
        lz_phrases=phrases,
        lz_bits=bits,
        input_length=len(s),
        alphabet_size=s.alphabet_size,
        bdm_bits=bdm_bits,
        bdm_missing_blocks=missing,
    )


def demo_ctm_table() -> CtmTable:
    """The bundled block-3, symbols 1..9 table. Its values are placeholders, not CTM estimates."""
    return load_ctm_table(Path(__file__).parent / "data" / "demo_ctm_b3_a9_PLACEHOLDER.tsv")
