"""
Pydantic models for the toolkit's domain values and reports
"""

from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, field_validator, model_validator

from balanced.utils.exact_utils import (
    QMatrix,
    distinct_permutations,
    format_rational,
    mask_members,
    members_mask,
    parse_rational,
    satisfies_ones,
)

MAX_PLAYERS = 16


def _validate_rational(value: Any) -> Fraction:
    try:
        return parse_rational(value)
    except TypeError as e:
        raise ValueError(str(e)) from e


Rational = Annotated[
    Fraction,
    PlainValidator(_validate_rational),
    PlainSerializer(format_rational, return_type=str, when_used="json"),
]


class ExactModel(BaseModel):
    """Frozen base model that accepts exact rationals"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class Coalition(ExactModel):
    """Nonempty subset of the players [n], player i at bit i-1"""

    n: int = Field(..., ge=1, le=MAX_PLAYERS, description="Number of players")
    mask: int = Field(..., ge=1, description="Bit mask of members")

    @model_validator(mode="after")
    def check_subset(self) -> "Coalition":
        if self.mask >> self.n:
            raise ValueError(f"Coalition mask {self.mask} is not a subset of [{self.n}]")
        return self

    @classmethod
    def from_members(cls, n: int, members: List[int]) -> "Coalition":
        return cls(n=n, mask=members_mask(members))

    def members(self) -> List[int]:
        return mask_members(self.mask)


class ZeroOneMatrix(ExactModel):
    """n×m 0-1 matrix stored by columns, each column a subset of [n]"""

    n: int = Field(..., ge=1, le=MAX_PLAYERS, description="Rows (players)")
    columns: Tuple[int, ...] = Field(..., min_length=1, description="Column masks, order significant")

    @model_validator(mode="after")
    def check_columns(self) -> "ZeroOneMatrix":
        for col in self.columns:
            if col < 0 or col >> self.n:
                raise ValueError(f"Column mask {col} is not a subset of [{self.n}]")
        return self

    @property
    def m(self) -> int:
        return len(self.columns)

    def rows(self) -> Tuple[int, ...]:
        """Row view: row i as an m-bit mask (bit j set iff player i+1 is in column j)"""
        return tuple(sum(((col >> i) & 1) << j for j, col in enumerate(self.columns)) for i in range(self.n))

    def to_qmatrix(self) -> QMatrix:
        return QMatrix.from_columns(self.columns, self.n)

    def to_payload(self) -> Dict[str, Any]:
        return {"n": self.n, "columns": [mask_members(col) for col in self.columns]}

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "ZeroOneMatrix":
        return cls(n=payload["n"], columns=tuple(members_mask(col) for col in payload["columns"]))


class Collection(ExactModel):
    """Set of distinct coalitions in canonical (ascending mask) order"""

    n: int = Field(..., ge=1, le=MAX_PLAYERS, description="Number of players")
    sets: Tuple[int, ...] = Field(..., min_length=1, description="Coalition masks, strictly increasing")

    @model_validator(mode="after")
    def check_canonical(self) -> "Collection":
        previous = 0
        for mask in self.sets:
            if mask <= previous:
                raise ValueError("Collection masks must be nonempty and strictly increasing")
            if mask >> self.n:
                raise ValueError(f"Coalition mask {mask} is not a subset of [{self.n}]")
            previous = mask
        return self

    @classmethod
    def from_masks(cls, n: int, masks: List[int]) -> "Collection":
        """Canonicalize: sort ascending and drop duplicates"""
        return cls(n=n, sets=tuple(sorted(set(masks))))

    @property
    def size(self) -> int:
        return len(self.sets)

    def matrix(self) -> ZeroOneMatrix:
        return ZeroOneMatrix(n=self.n, columns=self.sets)

    def subcollection(self, selector: int) -> "Collection":
        """Members whose index bit is set in selector"""
        return Collection(n=self.n, sets=tuple(s for k, s in enumerate(self.sets) if (selector >> k) & 1))

    def covers_all(self) -> bool:
        union = 0
        for mask in self.sets:
            union |= mask
        return union == (1 << self.n) - 1

    def key(self) -> str:
        """Stable text key used for hashing and digests"""
        return f"{self.n}:" + ",".join(str(s) for s in self.sets)

    def to_payload(self) -> Dict[str, Any]:
        return {"n": self.n, "sets": [mask_members(s) for s in self.sets]}

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "Collection":
        return cls.from_masks(payload["n"], [members_mask(s) for s in payload["sets"]])


class BalanceKind(str, Enum):
    NOT_WEAKLY_BALANCED = "not-weakly-balanced"
    WEAKLY_BALANCED = "weakly-balanced"
    BALANCED = "balanced"
    MINIMAL_BALANCED = "minimal-balanced"


class BalanceCertificate(ExactModel):
    """Classification of a collection with its exact evidence"""

    kind: BalanceKind
    collection: Collection
    weights: Optional[Tuple[Rational, ...]] = None
    witness: Optional[Collection] = None

    @model_validator(mode="after")
    def check_evidence(self) -> "BalanceCertificate":
        if self.weights is not None and not satisfies_ones(self.collection.sets, self.collection.n, self.weights):
            raise ValueError("Certificate weights do not solve M·λ = 1")
        if self.kind is BalanceKind.MINIMAL_BALANCED:
            if self.weights is None or any(w <= 0 for w in self.weights):
                raise ValueError("Minimal balanced certificates need strictly positive weights")
        return self

    def to_payload(self) -> Dict[str, Any]:
        payload = self.collection.to_payload()
        payload["kind"] = self.kind.value
        payload["weights"] = None if self.weights is None else [format_rational(w) for w in self.weights]
        payload["witness"] = None if self.witness is None else self.witness.to_payload()
        return payload


class UnificatorSet(ExactModel):
    """All 0-1 rows u with u·λ = 1, with their rational rank"""

    weights: Tuple[Rational, ...]
    rows: Tuple[int, ...]
    rank: int = Field(..., ge=0)

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def size(self) -> int:
        return len(self.rows)


class LambdaClass(ExactModel):
    """Permutation class of a weight vector, stored by its descending representative"""

    vector: Tuple[Rational, ...] = Field(..., min_length=1)
    multiplicity: int = Field(..., ge=1)

    @model_validator(mode="after")
    def check_canonical(self) -> "LambdaClass":
        if any(a < b for a, b in zip(self.vector, self.vector[1:])):
            raise ValueError("LambdaClass vector must be sorted descending")
        if self.multiplicity != distinct_permutations(self.vector):
            raise ValueError("LambdaClass multiplicity must count distinct permutations")
        return self

    @classmethod
    def from_vector(cls, vector: Tuple[Fraction, ...]) -> "LambdaClass":
        canonical = tuple(sorted(vector, reverse=True))
        return cls(vector=canonical, multiplicity=distinct_permutations(canonical))


class LambdaSet(ExactModel):
    """Weight-vector set of size m, one entry per permutation class"""

    m: int = Field(..., ge=1)
    classes: Tuple[LambdaClass, ...]

    @model_validator(mode="after")
    def check_classes(self) -> "LambdaSet":
        seen = set()
        for cls_ in self.classes:
            if len(cls_.vector) != self.m:
                raise ValueError(f"LambdaClass of length {len(cls_.vector)} in a set for m = {self.m}")
            if cls_.vector in seen:
                raise ValueError("LambdaSet classes must be pairwise distinct")
            seen.add(cls_.vector)
        return self

    @classmethod
    def from_vectors(cls, m: int, vectors) -> "LambdaSet":
        """Deduplicate into classes in a fixed (descending lexicographic) order"""
        canonical = {tuple(sorted(v, reverse=True)) for v in vectors}
        ordered = sorted(canonical, reverse=True)
        return cls(m=m, classes=tuple(LambdaClass.from_vector(v) for v in ordered))

    def keys(self) -> set:
        return {c.vector for c in self.classes}

    @property
    def total_vectors(self) -> int:
        return sum(c.multiplicity for c in self.classes)


class CountTable(ExactModel):
    """B_{n,m} for m = 1..n and their total"""

    n: int = Field(..., ge=1)
    per_m: Tuple[int, ...]
    total: int = Field(..., ge=0)

    @model_validator(mode="after")
    def check_total(self) -> "CountTable":
        if len(self.per_m) != self.n:
            raise ValueError("per_m must have one entry for each m = 1..n")
        if any(x < 0 for x in self.per_m):
            raise ValueError("Counts must be nonnegative")
        if sum(self.per_m) != self.total:
            raise ValueError("total must equal the sum of per_m")
        return self


class BoundReport(ExactModel):
    """Exact evaluation of the two-sided bound on the total count"""

    n: int
    b_n: int
    lower: Rational
    upper: Rational
    alpha_lower: Rational
    lower_approx: float
    upper_approx: float
    lower_holds: bool
    upper_holds: bool

    @property
    def holds(self) -> bool:
        return self.lower_holds and self.upper_holds


class LemmaCheck(ExactModel):
    """One numeric inequality lhs (relation) rhs with its margin rhs - lhs"""

    name: str
    n: int
    m: int
    lhs: Rational
    rhs: Rational
    relation: Literal["<", "<="]
    holds: bool
    margin: Rational


class BoundLemmaReport(ExactModel):
    n: int
    checks: Tuple[LemmaCheck, ...]

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)


class EstimateRow(ExactModel):
    """Single-weight estimate against the exact count and its asymptotic form"""

    n: int
    m: int
    estimate: int
    count: int
    asymptotic: Rational
    ratio_to_asymptotic: Rational
    share_of_count: Rational


class InversionOutcome(ExactModel):
    kind: Literal["weights", "rank-collapse"]
    weights: Optional[Tuple[Rational, ...]] = None


class OrbitMember(ExactModel):
    inversion: int
    classification: Literal["positive", "nonzero", "zero-weight", "rank-collapsed", "inconsistent"]
    weights: Optional[Tuple[Rational, ...]] = None


class OrbitSummary(ExactModel):
    """Classification counts over all 2^m column inversions of a base matrix"""

    base: ZeroOneMatrix
    weights: Tuple[Rational, ...]
    size_nonzero: int
    size_positive: int
    unificator_count: int
    positive_inversions: Tuple[int, ...]
    formula_consistent: bool
    members: Optional[Tuple[OrbitMember, ...]] = None

    def to_payload(self) -> Dict[str, Any]:
        payload = self.model_dump(mode="json", exclude={"base"})
        payload["base"] = self.base.to_payload()
        return payload


class MinimalCollection(ExactModel):
    """A minimal balanced collection with its unique positive weights"""

    collection: Collection
    weights: Tuple[Rational, ...]

    def to_payload(self) -> Dict[str, Any]:
        payload = self.collection.to_payload()
        payload["weights"] = [format_rational(w) for w in self.weights]
        return payload

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "MinimalCollection":
        return cls(collection=Collection.from_payload(payload), weights=tuple(parse_rational(w) for w in payload["weights"]))


class EnumerationResult(ExactModel):
    """All minimal balanced collections on [n], canonically ordered"""

    n: int
    mode: str
    items: Tuple[MinimalCollection, ...]
    per_m_counts: Tuple[int, ...]
    checksum: str
    digest: str
    complete: bool = True

    @property
    def total(self) -> int:
        return len(self.items)

    def summary(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "mode": self.mode,
            "total": self.total,
            "per_m": list(self.per_m_counts),
            "checksum": self.checksum,
            "digest": self.digest,
            "complete": self.complete,
        }


class TwoElementCensus(ExactModel):
    """Minimal balanced collections of 2-element sets, by component shape"""

    n: int = Field(..., ge=2)
    by_shape: Dict[str, int]
    total: int

    @model_validator(mode="after")
    def check_total(self) -> "TwoElementCensus":
        if sum(self.by_shape.values()) != self.total:
            raise ValueError("total must equal the sum over shapes")
        return self


class MatrixSpaceScan(ExactModel):
    """Exhaustive classification of all n×m 0-1 matrices"""

    n: int
    m: int
    full_rank: int
    nonzero: int
    positive: int
    per_support: Dict[int, int]


class TUGame(ExactModel):
    """Transferable-utility game, worths indexed by coalition mask"""

    n: int = Field(..., ge=1, le=MAX_PLAYERS)
    v: Tuple[Rational, ...]

    @model_validator(mode="after")
    def check_worths(self) -> "TUGame":
        if len(self.v) != 1 << self.n:
            raise ValueError(f"Game on {self.n} players needs {1 << self.n} worths")
        if self.v[0] != 0:
            raise ValueError("Worth of the empty coalition must be 0")
        return self

    @property
    def grand_worth(self) -> Fraction:
        return self.v[-1]

    def worth(self, mask: int) -> Fraction:
        return self.v[mask]


class CoreReport(ExactModel):
    """Core (non)emptiness with exactly one verifiable witness"""

    nonempty: bool
    method: Literal["bondareva", "lp"]
    violating: Optional[MinimalCollection] = None
    slack: Optional[Rational] = None
    allocation: Optional[Tuple[Rational, ...]] = None

    @model_validator(mode="after")
    def check_witness(self) -> "CoreReport":
        if (self.violating is None) == (self.allocation is None):
            raise ValueError("Exactly one of violating / allocation must be present")
        if self.nonempty != (self.allocation is not None):
            raise ValueError("Nonempty cores carry an allocation, empty cores a violating collection")
        return self

    def to_payload(self) -> Dict[str, Any]:
        payload = self.model_dump(mode="json", exclude={"violating"})
        payload["violating"] = None if self.violating is None else self.violating.to_payload()
        return payload


class VerifyDiff(ExactModel):
    key: str
    expected: str
    computed: str


class VerifySuiteReport(ExactModel):
    name: Literal["tables", "formulas", "bounds", "orbits", "lambda", "two-element", "games", "oracles"]
    scope: int
    passed: bool
    checked: int
    diffs: Tuple[VerifyDiff, ...] = ()

    @field_validator("diffs")
    @classmethod
    def limit_diffs(cls, v):
        return tuple(v[:200])


class WeightClassification(ExactModel):
    """Where a 0-1 matrix sits among full-rank, nowhere-zero and positive matrices"""

    status: Literal["unique", "rank-deficient", "inconsistent"]
    weights: Optional[Tuple[Rational, ...]] = None
    pos_support: int = 0
    neg_support: int = 0

    @property
    def full_rank_with_weights(self) -> bool:
        return self.weights is not None

    @property
    def nonzero(self) -> bool:
        return self.weights is not None and all(w != 0 for w in self.weights)

    @property
    def positive(self) -> bool:
        return self.weights is not None and all(w > 0 for w in self.weights)

    @property
    def nonnegative(self) -> bool:
        return self.weights is not None and all(w >= 0 for w in self.weights)


class UnificatorExtremes(ExactModel):
    """Smallest and largest unificator sets over a weight-vector set, plus antichain violations"""

    m: int
    min_size: int
    max_size: int
    antichain_violations: int
