"""Trainable boundary predicates and input-matrix assembly.

Each continuous feature owns k "greater than" bounds and k "less than"
bounds, both trainable, initialised by equal-width binning of the feature
range.  Transform entries apply a registered non-linear function first and
bin its codomain.  Discrete (Boolean) features contribute a one-hot pair.
The input matrix concatenates all predicate truth values per batch row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autograd
from .autograd import Tensor
from .errors import ConfigurationError, DimensionMismatchError

# Boundary predicates stay nearly crisp so extracted inequalities read well.
DEFAULT_BOUNDARY_SHARPNESS = 20.0


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


def eval_gt(x, bound, c: float = DEFAULT_BOUNDARY_SHARPNESS):
    """Soft truth of ``x > bound``: sigmoid(c * (x - bound))."""
    return _sigmoid(c * (np.asarray(x, dtype=np.float64) - bound))


def eval_lt(x, bound, c: float = DEFAULT_BOUNDARY_SHARPNESS):
    """Soft truth of ``x < bound``: sigmoid(-c * (x - bound))."""
    return _sigmoid(-c * (np.asarray(x, dtype=np.float64) - bound))


def encode_discrete(value) -> tuple[float, float]:
    """Boolean value -> (truth of e, truth of not-e)."""
    return (1.0, 0.0) if value else (0.0, 1.0)


# -- transform registry ------------------------------------------------------

def _square_range(low: float, high: float) -> tuple[float, float]:
    if low <= 0.0 <= high:
        lo = 0.0
    else:
        lo = min(low * low, high * high)
    return lo, max(low * low, high * high)


# name -> (function, codomain given the feature range)
TRANSFORM_FUNCTIONS = {
    "sine": (np.sin, lambda low, high: (-1.0, 1.0)),
    "cosine": (np.cos, lambda low, high: (-1.0, 1.0)),
    "square": (np.square, _square_range),
    "absolute": (np.abs, lambda low, high: (0.0, max(abs(low), abs(high)))),
}


def transform_atom_name(feature: str, func_name: str) -> str:
    return f"{feature}{func_name.capitalize()}"


class TransformKB:
    """Registered non-linear transformations of continuous state features."""

    def __init__(self, registrations: dict[str, str] | None = None):
        self.registrations: dict[str, str] = dict(registrations or {})
        for feature, func_name in self.registrations.items():
            if func_name not in TRANSFORM_FUNCTIONS:
                raise ConfigurationError(
                    f"unknown transform function {func_name!r} for feature {feature!r}; "
                    f"known: {sorted(TRANSFORM_FUNCTIONS)}")

    def __contains__(self, feature: str) -> bool:
        return feature in self.registrations

    def __len__(self) -> int:
        return len(self.registrations)

    def apply(self, feature: str, value):
        func, _ = TRANSFORM_FUNCTIONS[self.registrations[feature]]
        return func(value)

    def atom_name(self, feature: str) -> str:
        return transform_atom_name(feature, self.registrations[feature])

    def codomain(self, feature: str, low: float, high: float) -> tuple[float, float]:
        _, rng = TRANSFORM_FUNCTIONS[self.registrations[feature]]
        return rng(low, high)


def eval_transform_predicates(x, func_name: str, gt_bounds, lt_bounds,
                              c: float = DEFAULT_BOUNDARY_SHARPNESS) -> np.ndarray:
    """Apply a registered function, then the 2k boundary predicates.

    Returns the interleaved (gt_1, lt_1, ..., gt_k, lt_k) truth values.
    """
    if func_name not in TRANSFORM_FUNCTIONS:
        raise ConfigurationError(f"unknown transform function {func_name!r}")
    func, _ = TRANSFORM_FUNCTIONS[func_name]
    fx = func(np.asarray(x, dtype=np.float64))
    gt = eval_gt(fx, np.asarray(gt_bounds), c)
    lt = eval_lt(fx, np.asarray(lt_bounds), c)
    return np.stack([gt, lt], axis=-1).reshape(*np.shape(fx), -1)


# -- schema -------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuousFeature:
    name: str
    low: float
    high: float
    bins: int


@dataclass(frozen=True)
class DiscreteFeature:
    name: str


@dataclass
class FeatureSchema:
    """Ordered feature declaration; raw state vectors follow this order
    (continuous features first, then discrete flags)."""

    continuous: list[ContinuousFeature] = field(default_factory=list)
    discrete: list[DiscreteFeature] = field(default_factory=list)

    def __post_init__(self):
        problems = []
        names = [f.name for f in self.continuous] + [f.name for f in self.discrete]
        if len(set(names)) != len(names):
            problems.append(f"duplicate feature names in {names}")
        for f in self.continuous:
            if not f.low < f.high:
                problems.append(f"{f.name}: low {f.low} must be < high {f.high}")
            if f.bins < 1:
                problems.append(f"{f.name}: bin count {f.bins} must be >= 1")
        if problems:
            raise ConfigurationError(problems)

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.continuous] + [f.name for f in self.discrete]

    @property
    def state_dim(self) -> int:
        return len(self.continuous) + len(self.discrete)

    def continuous_by_name(self, name: str) -> ContinuousFeature:
        for f in self.continuous:
            if f.name == name:
                return f
        raise KeyError(name)

    def input_width(self, kb: TransformKB | None = None) -> int:
        """Number of input-matrix columns: 2k per continuous entry
        (transforms included) plus 2 per discrete feature."""
        width = sum(2 * f.bins for f in self.continuous)
        if kb is not None:
            width += sum(2 * f.bins for f in self.continuous if f.name in kb)
        width += 2 * len(self.discrete)
        return width

    def descriptor(self, kb: TransformKB | None = None) -> dict:
        """JSON-friendly fingerprint used to detect checkpoint mismatch."""
        return {
            "continuous": [[f.name, f.low, f.high, f.bins] for f in self.continuous],
            "discrete": [f.name for f in self.discrete],
            "transforms": dict(kb.registrations) if kb is not None else {},
        }


# -- predicate bank -----------------------------------------------------------

@dataclass
class BankEntry:
    """Trainable bounds for one continuous atom (raw feature or transform)."""

    name: str            # atom display name, e.g. CartPos or PoleAngleSine
    source: str          # raw feature the values come from
    func_name: str | None  # registered transform, None for raw features
    gt_bounds: Tensor    # (k,) lower edges at init
    lt_bounds: Tensor    # (k,) upper edges at init
    sharpness: float     # sigmoid steepness, normalised per bin width

    @property
    def bins(self) -> int:
        return self.gt_bounds.data.shape[0]


class PredicateBank:
    """All trainable boundary predicates for a schema (+ transform entries)."""

    def __init__(self, entries: list[BankEntry],
                 sharpness: float = DEFAULT_BOUNDARY_SHARPNESS):
        self.entries = entries
        self.by_name = {e.name: e for e in entries}
        self.sharpness = float(sharpness)

    def parameters(self) -> list[Tensor]:
        params = []
        for e in self.entries:
            params.extend([e.gt_bounds, e.lt_bounds])
        return params


def init_equal_width(schema: FeatureSchema, kb: TransformKB | None = None,
                     sharpness: float = DEFAULT_BOUNDARY_SHARPNESS) -> PredicateBank:
    """Equal-width binning: bin i of [low, high] spans
    [low + (i-1)w, low + iw] with w = (high - low) / k.

    The gt bound of bin i starts at the lower edge and the lt bound at the
    upper edge, so the pair selects exactly that bin.  Transform entries get
    fresh bounds over the codomain of their function.

    Each entry's sigmoid steepness is `sharpness / bin_width`, so a
    predicate resolves the same fraction of its bin no matter the feature
    scale (a flat steepness would leave small-range features fuzzy).
    """
    entries: list[BankEntry] = []
    for f in schema.continuous:
        entries.append(_make_entry(f.name, f.name, None, f.low, f.high, f.bins,
                                   sharpness))
    if kb is not None:
        for f in schema.continuous:
            if f.name in kb:
                low, high = kb.codomain(f.name, f.low, f.high)
                entries.append(_make_entry(kb.atom_name(f.name), f.name,
                                           kb.registrations[f.name], low, high,
                                           f.bins, sharpness))
    return PredicateBank(entries, sharpness)


def _make_entry(name, source, func_name, low, high, k, sharpness) -> BankEntry:
    if k < 1:
        raise ConfigurationError(f"{name}: bin count must be >= 1, got {k}")
    edges = np.linspace(low, high, k + 1)
    bin_width = (high - low) / k
    return BankEntry(
        name=name, source=source, func_name=func_name,
        gt_bounds=Tensor(edges[:-1].copy(), requires_grad=True),
        lt_bounds=Tensor(edges[1:].copy(), requires_grad=True),
        sharpness=sharpness / bin_width,
    )


# -- input matrix ---------------------------------------------------------------

@dataclass(frozen=True)
class Column:
    """Label of one input-matrix column, kept for rule extraction."""

    atom: str        # display name (feature, transform atom, or discrete name)
    kind: str        # "gt" | "lt" | "true" | "false"
    index: int       # bin index for continuous columns, -1 for discrete


@dataclass
class InputMatrix:
    values: Tensor                # (batch, n_e), entries in [0, 1]
    columns: list[Column]

    @property
    def width(self) -> int:
        return len(self.columns)


def matrix_columns(schema: FeatureSchema, kb: TransformKB | None = None) -> list[Column]:
    """Column labels in assembly order: raw continuous blocks, transform
    blocks, then discrete pairs."""
    cols: list[Column] = []
    for f in schema.continuous:
        for i in range(f.bins):
            cols.append(Column(f.name, "gt", i))
            cols.append(Column(f.name, "lt", i))
    if kb is not None:
        for f in schema.continuous:
            if f.name in kb:
                atom = kb.atom_name(f.name)
                for i in range(f.bins):
                    cols.append(Column(atom, "gt", i))
                    cols.append(Column(atom, "lt", i))
    for f in schema.discrete:
        cols.append(Column(f.name, "true", -1))
        cols.append(Column(f.name, "false", -1))
    return cols


def build_input_matrix(processed: dict[str, np.ndarray], bank: PredicateBank,
                       schema: FeatureSchema,
                       kb: TransformKB | None = None) -> InputMatrix:
    """Assemble the fuzzy input matrix for a batch of processed states.

    `processed` maps every atom source (feature names plus transform atom
    names) to a (batch,) value array; discrete features map to 0/1 arrays.
    Differentiable with respect to the bank's bound tensors.
    """
    columns = matrix_columns(schema, kb)
    blocks: list[Tensor] = []
    batch = None

    def continuous_block(entry: BankEntry, values: np.ndarray) -> Tensor:
        v = Tensor(values[:, None])
        gt = ((v - entry.gt_bounds) * entry.sharpness).sigmoid()   # (b, k)
        lt = ((entry.lt_bounds - v) * entry.sharpness).sigmoid()   # (b, k)
        paired = autograd.stack([gt, lt], axis=2)                  # (b, k, 2)
        return paired.reshape(values.shape[0], 2 * entry.bins)

    for f in schema.continuous:
        values = _column_values(processed, f.name, schema)
        batch = values.shape[0] if batch is None else batch
        if values.shape[0] != batch:
            raise DimensionMismatchError("columns in processed batch disagree on length")
        blocks.append(continuous_block(bank.by_name[f.name], values))
    if kb is not None:
        for f in schema.continuous:
            if f.name in kb:
                atom = kb.atom_name(f.name)
                values = _column_values(processed, atom, schema)
                blocks.append(continuous_block(bank.by_name[atom], values))
    for f in schema.discrete:
        values = _column_values(processed, f.name, schema)
        flags = values.astype(bool)
        block = np.empty((values.shape[0], 2), dtype=np.float64)
        block[:, 0] = flags
        block[:, 1] = ~flags
        blocks.append(Tensor(block))

    matrix = autograd.concat(blocks, axis=1) if blocks else Tensor(np.zeros((0, 0)))
    if matrix.data.shape[1] != len(columns):
        raise DimensionMismatchError(
            f"assembled {matrix.data.shape[1]} columns, expected {len(columns)}")
    return InputMatrix(values=matrix, columns=columns)


def _column_values(processed: dict[str, np.ndarray], name: str,
                   schema: FeatureSchema) -> np.ndarray:
    try:
        values = np.asarray(processed[name], dtype=np.float64)
    except KeyError:
        raise DimensionMismatchError(
            f"processed batch is missing {name!r}; schema expects "
            f"{schema.feature_names}") from None
    if values.ndim != 1:
        raise DimensionMismatchError(f"{name}: expected 1-D batch column")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name}: non-finite feature value")
    return values


def bound_value(bank: PredicateBank, column: Column) -> float:
    """Current trained bound behind a continuous column."""
    entry = bank.by_name[column.atom]
    tensor = entry.gt_bounds if column.kind == "gt" else entry.lt_bounds
    return float(tensor.data[column.index])
