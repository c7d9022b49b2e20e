"""Exact correlations, finite mixing windows, and the rigidity obstruction.

The correlation of two interval sets at time n is lambda(T^{-n}A n B),
computed exactly through the piecewise translation T^{-n}.  A finite
mixing window checks that all dyadic-pair correlations stay within eps of
the product for every time in [j, k].  The obstruction turns a rigidity
certificate into a dyadic interval whose self-correlation at the
certificate time k provably exceeds twice the square of its measure,
which is incompatible with mixing along any sequence containing k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .errors import ParseError, PreconditionError, VerificationError
from .exactnum import ONE, ZERO, ExactScalar, scalar
from .iet import IET, SCHEMA
from .intervals import Interval, IntervalSet, dyadic
from .rigidity import RigidityCertificate, verify_certificate


@dataclass(frozen=True)
class CorrelationReport:
    n: int
    set_a: IntervalSet
    set_b: IntervalSet
    value: ExactScalar  # lambda(T^{-n} A n B)
    target: ExactScalar  # lambda(A) * lambda(B)

    @property
    def deviation(self) -> ExactScalar:
        diff = self.value - self.target
        return diff if diff.sign() >= 0 else -diff

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": "correlation",
            "n": self.n,
            "A": self.set_a.to_json(),
            "B": self.set_b.to_json(),
            "value": str(self.value),
            "target": str(self.target),
            "deviation": str(self.deviation),
        }


def correlation(iet: IET, set_a: IntervalSet, set_b: IntervalSet, n: int):
    """Exact lambda(T^{-n} A n B) together with the product target."""
    pulled = iet.power(-n).image_of_set(set_a)
    value = pulled.intersect(set_b).measure()
    target = set_a.measure() * set_b.measure()
    return CorrelationReport(n, set_a, set_b, value, target)


def dyadic_correlation_matrix(iet: IET, n: int, depth: int):
    """Measures lambda(T^{-n} D_a n D_b) over all depth-`depth` leaf pairs."""
    leaves = [dyadic(depth, b) for b in range(2**depth)]
    pw = iet.power(-n)
    matrix = []
    for a, leaf_a in enumerate(leaves):
        pulled = pw.image_of_set(IntervalSet.of(leaf_a))
        row = []
        for leaf_b in leaves:
            row.append(pulled.intersect(IntervalSet.of(leaf_b)).measure())
        matrix.append(row)
    return matrix


@dataclass
class MixingWindowReport:
    passed: bool
    j: int
    k: int
    epsilon: ExactScalar
    depth: int
    witness: Optional[dict]  # {"n", "a": (depth, index), "b", "deviation"}

    def to_json(self):
        witness = None
        if self.witness is not None:
            witness = {
                "n": self.witness["n"],
                "a": list(self.witness["a"]),
                "b": list(self.witness["b"]),
                "value": str(self.witness["value"]),
                "target": str(self.witness["target"]),
                "deviation": str(self.witness["deviation"]),
            }
        return {
            "schema": SCHEMA,
            "kind": "mixing-window-report",
            "passed": self.passed,
            "j": self.j,
            "k": self.k,
            "epsilon": str(self.epsilon),
            "depth": self.depth,
            "witness": witness,
        }


def mixing_window_check(
    iet: IET, j: int, k: int, epsilon, depth: int = 6
) -> MixingWindowReport:
    """Check every dyadic pair of depth <= `depth` at every time in [j, k].

    Passes when |lambda(T^{-n} A n B) - lambda(A)lambda(B)| < epsilon for
    all such pairs and times; otherwise reports the first witness in
    (n, depth_a, index_a, depth_b, index_b) order.  Coarser dyadic pairs
    are aggregated from the leaf matrix by additivity.
    """
    eps = scalar(epsilon)
    if j > k:
        raise PreconditionError("window needs j <= k", j=j, k=k)
    if depth < 0:
        raise PreconditionError("depth must be >= 0", depth=depth)
    leaves = 2**depth
    for n in range(j, k + 1):
        matrix = dyadic_correlation_matrix(iet, n, depth)
        # prefix sums over both indices for O(1) block aggregation
        prefix = [[ZERO] * (leaves + 1) for _ in range(leaves + 1)]
        for a in range(leaves):
            row = prefix[a + 1]
            prev = prefix[a]
            acc = ZERO
            for b in range(leaves):
                acc = acc + matrix[a][b]
                row[b + 1] = prev[b + 1] + acc
        for depth_a in range(depth + 1):
            span_a = leaves >> depth_a
            target_a = scalar(Fraction(1, 2**depth_a))
            for idx_a in range(2**depth_a):
                a0, a1 = idx_a * span_a, (idx_a + 1) * span_a
                for depth_b in range(depth + 1):
                    span_b = leaves >> depth_b
                    target = target_a * scalar(Fraction(1, 2**depth_b))
                    for idx_b in range(2**depth_b):
                        b0, b1 = idx_b * span_b, (idx_b + 1) * span_b
                        value = (
                            prefix[a1][b1]
                            - prefix[a0][b1]
                            - prefix[a1][b0]
                            + prefix[a0][b0]
                        )
                        diff = value - target
                        deviation = diff if diff.sign() >= 0 else -diff
                        if not deviation < eps:
                            return MixingWindowReport(
                                False,
                                j,
                                k,
                                eps,
                                depth,
                                {
                                    "n": n,
                                    "a": (depth_a, idx_a),
                                    "b": (depth_b, idx_b),
                                    "value": value,
                                    "target": target,
                                    "deviation": deviation,
                                },
                            )
    return MixingWindowReport(True, j, k, eps, depth, None)


# ---------------------------------------------------------------------------
# the obstruction: partial rigidity forces correlation excess


def block_mixing_thresholds(region_measure) -> tuple[int, Fraction]:
    """Smallest kappa with 2^-kappa < c/4 and the epsilon cap 2^-(kappa+4)."""
    c = scalar(region_measure)
    if c.sign() <= 0:
        raise PreconditionError("region measure must be positive", measure=str(c))
    kappa = 0
    quarter = c / 4
    while not scalar(Fraction(1, 2**kappa)) < quarter:
        kappa += 1
    return kappa, Fraction(1, 2 ** (kappa + 4))


@dataclass
class BlockMixingWitness:
    kappa: int
    block_index: int
    interval: Interval  # the enlarged dyadic block, clipped to [0,1)
    value: ExactScalar  # lambda(T^k I n I)
    bound: ExactScalar  # 2 * lambda(I)^2
    k: int

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": "block-mixing-witness",
            "kappa": self.kappa,
            "block_index": self.block_index,
            "interval": self.interval.to_json(),
            "value": str(self.value),
            "bound": str(self.bound),
            "k": self.k,
        }


def rigidity_blocks_mixing(iet: IET, cert: RigidityCertificate) -> BlockMixingWitness:
    """Dyadic witness that the certificate time k defeats mixing.

    Requires the certificate's epsilon to sit below 2^-(kappa+4) for the
    smallest kappa with 2^-kappa < measure(A)/4.  Finds a dyadic block
    carrying at least measure(A)/2^kappa of A, enlarges it by 2^-(kappa+4)
    on both sides, clips to [0,1), and verifies exactly that
    lambda(T^k I n I) > 2 lambda(I)^2.  Blocks are tried in decreasing
    order of carried mass, so clipping losses at the boundary fall through
    to the next block.
    """
    report = verify_certificate(cert)
    report.ensure()
    c = cert.measure()
    kappa, eps_cap = block_mixing_thresholds(c)
    if cert.epsilon > scalar(eps_cap):
        raise PreconditionError(
            "certificate epsilon too large for the obstruction",
            epsilon=str(cert.epsilon),
            required=str(eps_cap),
            kappa=kappa,
        )
    den = 2**kappa
    margin = scalar(Fraction(1, 2 ** (kappa + 4)))
    candidates = []
    floor_mass = c * scalar(Fraction(1, den))
    for b in range(den):
        block = IntervalSet.of(dyadic(kappa, b))
        mass = cert.region.intersect(block).measure()
        if not mass < floor_mass:
            candidates.append((mass, b))
    if not candidates:
        raise VerificationError(
            "no dyadic block carries measure(A)/2^kappa", kappa=kappa
        )
    candidates.sort(key=lambda t: t[1])
    candidates.sort(key=lambda t: t[0], reverse=True)
    power = iet.power(cert.k)
    tried = []
    for mass, b in candidates:
        lo = scalar(Fraction(b, den)) - margin
        hi = scalar(Fraction(b + 1, den)) + margin
        if lo < ZERO:
            lo = ZERO
        if hi > ONE:
            hi = ONE
        enlarged = Interval(lo, hi)
        as_set = IntervalSet.of(enlarged)
        value = power.image_of_set(as_set).intersect(as_set).measure()
        bound = 2 * enlarged.length * enlarged.length
        if value > bound:
            return BlockMixingWitness(kappa, b, enlarged, value, bound, cert.k)
        tried.append({"block": b, "value": str(value), "bound": str(bound)})
    raise VerificationError(
        "no enlarged block beats twice its squared measure; "
        "the certificate does not witness rigidity",
        tried=tried,
    )


# ---------------------------------------------------------------------------
# thickness


_BUILTIN_GROWTH: dict[str, Callable[[int], int]] = {
    "j^j": lambda j: j**j,
    "2j": lambda j: 2 * j,
    "j^2": lambda j: j * j,
}


def growth_function(name: str) -> Callable[[int], int]:
    """Named growth functions: "j^j", "2j", "j^2", or "poly:c0,c1,...".

    Polynomial coefficients are integers, lowest degree first.
    """
    fn = _BUILTIN_GROWTH.get(name)
    if fn is not None:
        return fn
    if name.startswith("poly:"):
        try:
            coeffs = [int(c) for c in name[5:].split(",")]
        except ValueError:
            raise ParseError("bad polynomial coefficients", name=name) from None

        def poly(j, coeffs=tuple(coeffs)):
            total = 0
            power = 1
            for coef in coeffs:
                total += coef * power
                power *= j
            return total

        return poly
    raise ParseError("unknown growth function", name=name)


@dataclass
class ThicknessReport:
    sequence: list
    f_name: str
    min_witnesses: int
    witnesses: list

    @property
    def passed(self) -> bool:
        return len(self.witnesses) >= self.min_witnesses

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": "thickness-report",
            "f": self.f_name,
            "min_witnesses": self.min_witnesses,
            "witnesses": self.witnesses,
            "passed": self.passed,
        }


def thickness_check(sequence, f_name: str, min_witnesses: int) -> ThicknessReport:
    """All j whose full block [j, f(j)] sits inside the sorted sequence.

    The report passes when at least `min_witnesses` such j exist within
    the finite sequence.
    """
    seq = list(sequence)
    if any(b <= a for a, b in zip(seq, seq[1:])):
        raise PreconditionError("sequence must be strictly increasing")
    f = growth_function(f_name)
    witnesses = []
    # maximal runs of consecutive integers bound the candidate blocks
    run_start = None
    prev = None
    runs = []
    for x in seq:
        if run_start is None:
            run_start = x
        elif x != prev + 1:
            runs.append((run_start, prev))
            run_start = x
        prev = x
    if run_start is not None:
        runs.append((run_start, prev))
    for lo, hi in runs:
        for j in range(lo, hi + 1):
            top = f(j)
            if top < j:
                raise PreconditionError(
                    "growth function must satisfy f(j) >= j", j=j, f_j=top
                )
            if top <= hi:
                witnesses.append(j)
    return ThicknessReport(seq, f_name, min_witnesses, witnesses)
