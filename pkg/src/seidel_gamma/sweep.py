"""Gamma as a function of mu: grid sweeps and exact piecewise-linear fits."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientDataError, NonPiecewiseLinearError, SeidelGammaError
from .novikov import AffineExponent, as_rational
from .algebra import CPN
from .seidel import LoopClass, gamma

__all__ = [
    "PiecewiseLinear",
    "SweepSample",
    "default_grid",
    "fit_piecewise_linear",
    "sweep_gamma",
]


@dataclass(frozen=True)
class SweepSample:
    mu: Fraction
    p: int
    gamma: Fraction | None
    generic_mu: bool
    error: str | None = None


def default_grid():
    """``k/60`` for ``k = 1..180``, i.e. ``(0, 3]`` in steps of 1/60."""
    return [Fraction(k, 60) for k in range(1, 181)]


def _sample(args) -> SweepSample:
    manifold, p, mu, n, floor = args
    try:
        # CP^n has no mu; its samples are constant along the grid
        loop_mu = None if manifold == CPN else mu
        g = gamma(LoopClass(manifold, p, loop_mu, n), floor)
    except SeidelGammaError as exc:
        return SweepSample(mu, p, None, False, f"{type(exc).__name__}: {exc}")
    return SweepSample(mu, p, g.value, g.generic_mu)


def sweep_gamma(manifold: str, p: int, grid, n=None, floor=None, workers: int = 0):
    """One sample of ``Gamma(g^p)`` per value of mu in ``grid``.

    Failures are stored in the sample instead of aborting the sweep.  With
    ``workers > 1`` samples are computed in a process pool; the result is
    identical to the sequential one and ordered like ``grid``.
    """
    grid = [as_rational(m) for m in grid]
    if any(m <= 0 for m in grid):
        raise ValueError("grid values must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be sorted and free of duplicates")
    jobs = [(manifold, p, mu, n, floor) for mu in grid]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sample, jobs))
    return [_sample(job) for job in jobs]


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous function given by ``pieces[i]`` between consecutive breakpoints.

    Piece ``i`` is valid on ``[breakpoints[i-1], breakpoints[i]]`` with the
    outer pieces extending to the ends of ``domain``.
    """

    breakpoints: tuple
    pieces: tuple
    domain: tuple

    def piece_index(self, mu) -> int:
        mu = as_rational(mu)
        for i, b in enumerate(self.breakpoints):
            if mu <= b:
                return i
        return len(self.breakpoints)

    def __call__(self, mu) -> Fraction:
        mu = as_rational(mu)
        return self.pieces[self.piece_index(mu)].at(mu)

    def is_continuous(self) -> bool:
        return all(self.pieces[i].at(b) == self.pieces[i + 1].at(b)
                   for i, b in enumerate(self.breakpoints))


def _line(s1: SweepSample, s2: SweepSample) -> AffineExponent:
    slope = (s2.gamma - s1.gamma) / (s2.mu - s1.mu)
    return AffineExponent(s1.gamma - slope * s1.mu, slope)


def _on(line: AffineExponent, s: SweepSample) -> bool:
    return line.at(s.mu) == s.gamma


def fit_piecewise_linear(samples) -> PiecewiseLinear:
    """Recover an exact continuous piecewise-linear function from samples.

    Lines are seeded by two consecutive generic samples and extended while
    further samples lie on them exactly.  Samples flagged non-generic never
    seed a line, but they must lie on the fitted function.  Breakpoints are
    the exact intersections of adjacent lines.
    """
    pts = sorted((s for s in samples if s.gamma is not None), key=lambda s: s.mu)
    if len(pts) < 3:
        raise InsufficientDataError("at least 3 samples are needed")

    lines, spans = [], []  # spans: (first mu, last mu) of samples on each line
    i = 0
    while i < len(pts):
        seeds = [j for j in range(i, len(pts)) if pts[j].generic_mu][:2]
        if len(seeds) < 2:
            break
        line = _line(pts[seeds[0]], pts[seeds[1]])
        j = seeds[1] + 1
        while j < len(pts) and _on(line, pts[j]):
            j += 1
        first = i if _on(line, pts[i]) else seeds[0]
        lines.append(line)
        spans.append((pts[first].mu, pts[j - 1].mu))
        i = j
    if not lines:
        raise InsufficientDataError("fewer than 2 generic samples")

    # drop a line that merely repeats its predecessor
    merged_lines, merged_spans = [lines[0]], [spans[0]]
    for line, span in zip(lines[1:], spans[1:]):
        if line == merged_lines[-1]:
            merged_spans[-1] = (merged_spans[-1][0], span[1])
        else:
            merged_lines.append(line)
            merged_spans.append(span)

    breakpoints = []
    for k in range(len(merged_lines) - 1):
        a, b = merged_lines[k], merged_lines[k + 1]
        gap = (merged_spans[k][1], merged_spans[k + 1][0])
        if a.mu_coeff == b.mu_coeff:
            raise NonPiecewiseLinearError("parallel pieces do not meet", gap)
        x = (b.const_part - a.const_part) / (a.mu_coeff - b.mu_coeff)
        if not gap[0] <= x <= gap[1]:
            raise NonPiecewiseLinearError(
                f"pieces meet at mu={x}, outside the gap {gap[0]}..{gap[1]}", gap)
        breakpoints.append(x)

    pl = PiecewiseLinear(tuple(breakpoints), tuple(merged_lines), (pts[0].mu, pts[-1].mu))
    for s in pts:
        if pl(s.mu) != s.gamma:
            raise NonPiecewiseLinearError(f"sample at mu={s.mu} is off the fitted function",
                                          (s.mu, s.mu))
    return pl
