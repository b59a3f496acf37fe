"""Core data models for the spin-inverse package."""

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveInt,
    ValidationError,
    field_validator,
    model_validator,
)

from spin_inverse.errors import ModelValidationError

SYMMETRY_TOLERANCE = 1e-12
FRACTION_TOLERANCE = 1e-12
LATTICE_TOLERANCE = 1e-9


def _frozen_array(value: Any, dtype: Any) -> np.ndarray:
    array = np.array(value, dtype=dtype)
    array.setflags(write=False)
    return array


class ModelKind(str, Enum):
    """Which model family a run refers to."""
    CW = "cw"
    MS = "ms"


class Command(str, Enum):
    """CLI subcommands."""
    FORWARD = "forward"
    EXACT = "exact"
    SAMPLE = "sample"
    INVERT = "invert"
    STUDY_N = "study-n"
    STUDY_M = "study-m"
    SWEEP_CW = "sweep-cw"
    SWEEP_MS = "sweep-ms"


class OutputFormat(str, Enum):
    """Result file format."""
    CSV = "csv"
    JSON = "json"


class FractionVector(BaseModel):
    """Relative group sizes alpha_l = N_l / N."""
    model_config = ConfigDict(frozen=True)

    fractions: Tuple[float, ...]

    @field_validator("fractions")
    @classmethod
    def _check_fractions(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value:
            raise ValueError("at least one fraction is required")
        if any(not (0.0 < a <= 1.0) for a in value):
            raise ValueError("every fraction must lie in (0, 1]")
        if abs(math.fsum(value) - 1.0) > FRACTION_TOLERANCE:
            raise ValueError("fractions must sum to 1")
        return value

    @classmethod
    def from_sizes(cls, sizes: Tuple[int, ...]) -> "FractionVector":
        total = sum(sizes)
        return cls(fractions=tuple(n / total for n in sizes))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.fractions, dtype=float)

    def diagonal(self) -> np.ndarray:
        """The diagonal matrix D_alpha."""
        return np.diag(self.array)


class CwParams(BaseModel):
    """Single-population (Curie-Weiss) model parameters."""
    model_config = ConfigDict(frozen=True)

    n_spins: PositiveInt
    coupling: float = Field(allow_inf_nan=False)
    field: float = Field(allow_inf_nan=False)

    @property
    def k(self) -> int:
        return 1

    @property
    def group_sizes(self) -> Tuple[int, ...]:
        return (self.n_spins,)

    @property
    def total_spins(self) -> int:
        return self.n_spins

    @property
    def fractions(self) -> FractionVector:
        return FractionVector(fractions=(1.0,))

    def coupling_array(self) -> np.ndarray:
        return np.array([[self.coupling]], dtype=float)

    def field_array(self) -> np.ndarray:
        return np.array([self.field], dtype=float)

    def flipped(self) -> "CwParams":
        """Same model with the field negated."""
        return self.model_copy(update={"field": -self.field})

    def as_multispecies(self) -> "MsParams":
        return MsParams(
            group_sizes=(self.n_spins,),
            coupling_matrix=((self.coupling,),),
            field_vector=(self.field,),
        )


class MsParams(BaseModel):
    """Multi-species model parameters with a reduced k x k coupling matrix."""
    model_config = ConfigDict(frozen=True)

    group_sizes: Tuple[PositiveInt, ...]
    coupling_matrix: Tuple[Tuple[float, ...], ...]
    field_vector: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_block_structure(self) -> "MsParams":
        k = len(self.group_sizes)
        if k < 1:
            raise ValueError("at least one group is required")
        if len(self.coupling_matrix) != k or any(len(row) != k for row in self.coupling_matrix):
            raise ValueError(f"coupling_matrix must be {k}x{k}")
        if len(self.field_vector) != k:
            raise ValueError(f"field_vector must have {k} entries")

        values = [v for row in self.coupling_matrix for v in row] + list(self.field_vector)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("coupling_matrix and field_vector must be finite")

        for l in range(k):
            for s in range(l + 1, k):
                a, b = self.coupling_matrix[l][s], self.coupling_matrix[s][l]
                if abs(a - b) > SYMMETRY_TOLERANCE * max(1.0, abs(a), abs(b)):
                    raise ValueError(
                        f"coupling_matrix symmetry violated: J[{l}][{s}]={a} != J[{s}][{l}]={b}"
                    )
        # Zero self-couplings stay legal so decoupled null models can be expressed.
        for l in range(k):
            if self.coupling_matrix[l][l] < 0:
                raise ValueError(f"diagonal coupling J[{l}][{l}] must be non-negative")
        return self

    @property
    def k(self) -> int:
        return len(self.group_sizes)

    @property
    def total_spins(self) -> int:
        return sum(self.group_sizes)

    @property
    def fractions(self) -> FractionVector:
        return FractionVector.from_sizes(self.group_sizes)

    def coupling_array(self) -> np.ndarray:
        return np.array(self.coupling_matrix, dtype=float)

    def field_array(self) -> np.ndarray:
        return np.array(self.field_vector, dtype=float)

    def flipped(self) -> "MsParams":
        """Same model with every field negated."""
        return self.model_copy(update={"field_vector": tuple(-h for h in self.field_vector)})

    def permuted(self, order: List[int]) -> "MsParams":
        """Relabel the groups so that new group i is old group order[i]."""
        J = self.coupling_array()[np.ix_(order, order)]
        return MsParams(
            group_sizes=tuple(self.group_sizes[i] for i in order),
            coupling_matrix=tuple(tuple(row) for row in J.tolist()),
            field_vector=tuple(self.field_vector[i] for i in order),
        )


ModelParams = Union[CwParams, MsParams]


def validate(params: ModelParams) -> ModelParams:
    """Re-check every invariant of a parameter set.

    Instances built through ``model_construct`` skip pydantic validation;
    this is the explicit gate the numerical modules rely on.

    Returns:
        The same params object, unchanged

    Raises:
        ModelValidationError: naming the first violated invariant
    """
    try:
        type(params).model_validate(params.model_dump())
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        message = first["msg"].removeprefix("Value error, ")
        raise ModelValidationError(f"{location}: {message}" if location else message) from e
    return params


def build_params(
    group_sizes: Tuple[int, ...],
    coupling_matrix: Any,
    field_vector: Any,
) -> ModelParams:
    """Build CwParams for one group and MsParams otherwise."""
    J = np.asarray(coupling_matrix, dtype=float)
    h = np.asarray(field_vector, dtype=float)
    if len(group_sizes) == 1:
        return CwParams(n_spins=group_sizes[0], coupling=float(J.reshape(-1)[0]), field=float(h[0]))
    return MsParams(
        group_sizes=tuple(group_sizes),
        coupling_matrix=tuple(tuple(row) for row in J.tolist()),
        field_vector=tuple(h.tolist()),
    )


class MagnetizationSample(BaseModel):
    """M independent draws, stored as integer up-spin counts per group."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    group_sizes: Tuple[PositiveInt, ...]
    counts: np.ndarray

    @field_validator("counts", mode="before")
    @classmethod
    def _freeze_counts(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, np.int64)

    @model_validator(mode="after")
    def _check_lattice(self) -> "MagnetizationSample":
        k = len(self.group_sizes)
        if self.counts.ndim != 2 or self.counts.shape[1] != k:
            raise ValueError(f"counts must have shape (M, {k})")
        if self.counts.shape[0] < 1:
            raise ValueError("a sample needs at least one draw")
        sizes = np.array(self.group_sizes)
        if np.any(self.counts < 0) or np.any(self.counts > sizes):
            raise ValueError("up-spin counts must lie in [0, N_l]")
        return self

    @classmethod
    def from_magnetizations(cls, values: Any, group_sizes: Tuple[int, ...]) -> "MagnetizationSample":
        """Build a sample from magnetization values on the lattice.

        Raises:
            ModelValidationError: if a value is not an attainable magnetization
        """
        sizes = np.array(group_sizes, dtype=float)
        m = np.asarray(values, dtype=float).reshape(-1, len(group_sizes))
        raw = (m + 1.0) * sizes / 2.0
        counts = np.rint(raw)
        if np.any(np.abs(raw - counts) > LATTICE_TOLERANCE * np.maximum(sizes, 1.0)):
            raise ModelValidationError("magnetization values must lie on the (2c - N_l)/N_l lattice")
        try:
            return cls(group_sizes=tuple(group_sizes), counts=counts.astype(np.int64))
        except ValidationError as e:
            raise ModelValidationError(str(e)) from e

    @property
    def k(self) -> int:
        return len(self.group_sizes)

    @property
    def size(self) -> int:
        return int(self.counts.shape[0])

    @property
    def values(self) -> np.ndarray:
        """Magnetizations (2c - N_l) / N_l, shape (M, k)."""
        sizes = np.array(self.group_sizes, dtype=float)
        return (2.0 * self.counts - sizes) / sizes


class MeanFieldSolution(BaseModel):
    """A fixed point of the self-consistency equations."""
    model_config = ConfigDict(frozen=True)

    magnetization: Tuple[float, ...]
    residual: float
    stable: bool
    marginal: bool = False
    jacobian_radius: float

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.magnetization, dtype=float)


class SusceptibilityMatrix(BaseModel):
    """Thermodynamic susceptibility dm_l/dh_s."""
    model_config = ConfigDict(frozen=True)

    chi: Tuple[Tuple[float, ...], ...]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.chi, dtype=float)

    @property
    def scalar(self) -> float:
        if len(self.chi) != 1:
            raise ValueError("scalar susceptibility requires k = 1")
        return self.chi[0][0]


class MagnetizationDistribution(BaseModel):
    """Exact probability table over the magnetization spectrum.

    Support points are ordered lexicographically in their up-spin counts
    (C order over the (N_1+1) x ... x (N_k+1) grid).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: ModelParams
    shape: Tuple[int, ...]
    counts: np.ndarray
    log_weights: np.ndarray
    probabilities: np.ndarray
    log_partition: float
    well: Optional[Tuple[float, ...]] = None

    @field_validator("counts", mode="before")
    @classmethod
    def _freeze_counts(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, np.int64)

    @field_validator("log_weights", "probabilities", mode="before")
    @classmethod
    def _freeze_floats(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, float)

    @property
    def k(self) -> int:
        return len(self.shape)

    @property
    def support_size(self) -> int:
        return int(self.probabilities.shape[0])

    @property
    def group_sizes(self) -> Tuple[int, ...]:
        return self.model.group_sizes

    @property
    def magnetizations(self) -> np.ndarray:
        """Support points as magnetization vectors, shape (S, k)."""
        sizes = np.array(self.group_sizes, dtype=float)
        return (2.0 * self.counts - sizes) / sizes


class ExactMoments(BaseModel):
    """Exact first and second moments and the finite-size susceptibility."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mean: np.ndarray
    second: np.ndarray
    finite_size_chi: np.ndarray

    @field_validator("mean", "second", "finite_size_chi", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, float)

    @property
    def m_n(self) -> float:
        """Scalar finite-size magnetization (k = 1)."""
        return float(self.mean[0])

    @property
    def chi_n(self) -> float:
        """Scalar finite-size susceptibility (k = 1)."""
        return float(self.finite_size_chi[0, 0])


class SamplerConfig(BaseModel):
    """How many draws, from which seed, optionally inside one well."""
    model_config = ConfigDict(frozen=True)

    sample_count: PositiveInt
    seed: int = Field(ge=0, lt=2**64)
    well: Optional[MeanFieldSolution] = None


class EstimateSet(BaseModel):
    """One set of empirical moments and inferred parameters."""
    m_exp: List[float]
    chi_exp: List[List[float]]
    j_exp: List[List[float]]
    h_exp: List[float]


class EstimationResult(BaseModel):
    """Inferred parameters, averaged over replicates when there are several."""
    mean: EstimateSet
    std: Optional[EstimateSet] = None
    replicates: List[EstimateSet] = Field(default_factory=list)
    replicate_count: int = 1
    max_asymmetry: float = 0.0
    max_condition: float = 1.0

    @property
    def m_exp(self) -> List[float]:
        return self.mean.m_exp

    @property
    def chi_exp(self) -> List[List[float]]:
        return self.mean.chi_exp

    @property
    def j_exp(self) -> List[List[float]]:
        return self.mean.j_exp

    @property
    def h_exp(self) -> List[float]:
        return self.mean.h_exp


class PowerLawFit(BaseModel):
    """Least-squares fit of y = amplitude * x ** exponent on log-log axes."""
    amplitude: float
    exponent: float
    r_squared: float
    amplitude_stderr: float = 0.0
    exponent_stderr: float = 0.0
    points: int


class SweepCase(BaseModel):
    """Parameter-recovery outcome for one true parameter set."""
    case_id: int
    params: ModelParams
    result: EstimationResult
    j_distance: float
    h_distance: float
    max_pct_error: Optional[float] = None
    max_pct_error_j: Optional[float] = None
    max_pct_error_h: Optional[float] = None
    max_abs_error_near_zero: Optional[float] = None


class RunConfig(BaseModel):
    """Validated configuration for one CLI run.

    Keys are the field names; the flat config file and the emitted manifest
    use the same names.
    """
    model_config = ConfigDict(extra="forbid")

    command: Command
    model: ModelKind = ModelKind.CW
    n_spins: Optional[PositiveInt] = None
    coupling: Optional[float] = None
    field: Optional[float] = None
    group_sizes: Optional[List[PositiveInt]] = None
    coupling_matrix: Optional[List[List[float]]] = None
    field_vector: Optional[List[float]] = None
    sample_count: PositiveInt = 20000
    replicates: PositiveInt = 20
    seed: int = Field(default=20170101, ge=0, lt=2**64)
    sizes: Optional[List[PositiveInt]] = None
    sample_counts: Optional[List[PositiveInt]] = None
    couplings: Optional[List[float]] = None
    cases: Optional[List[MsParams]] = None
    well: Optional[int] = None
    cell_budget: PositiveInt = 10**8
    workers: PositiveInt = 1
    output: Optional[str] = None
    output_format: OutputFormat = OutputFormat.CSV

    @model_validator(mode="after")
    def _check_model_kind(self) -> "RunConfig":
        cw_only = (Command.STUDY_N, Command.STUDY_M, Command.SWEEP_CW)
        if self.command in cw_only and self.model != ModelKind.CW:
            raise ValueError(f"command '{self.command.value}' supports only model 'cw'")
        if self.command == Command.SWEEP_MS:
            self.model = ModelKind.MS
        return self

    def missing_fields(self) -> List[str]:
        """Fields the chosen command and model still need."""
        if self.command == Command.SWEEP_MS:
            needed: List[str] = []
        elif self.command == Command.STUDY_N:
            needed = ["coupling", "field", "sizes"]
        elif self.command == Command.STUDY_M:
            needed = ["n_spins", "coupling", "field", "sample_counts"]
        elif self.command == Command.SWEEP_CW:
            needed = ["n_spins", "field", "couplings"]
        elif self.model == ModelKind.CW:
            needed = ["n_spins", "coupling", "field"]
        else:
            needed = ["group_sizes", "coupling_matrix", "field_vector"]
        return [name for name in needed if getattr(self, name) is None]

    def model_params(self) -> ModelParams:
        """The model parameters this run refers to."""
        if self.model == ModelKind.CW:
            return CwParams(n_spins=self.n_spins, coupling=self.coupling, field=self.field)
        return MsParams(
            group_sizes=tuple(self.group_sizes),
            coupling_matrix=tuple(tuple(row) for row in self.coupling_matrix),
            field_vector=tuple(self.field_vector),
        )

    def to_document(self) -> Dict[str, Any]:
        """Flat JSON-ready dict, without unset optional keys."""
        return self.model_dump(mode="json", exclude_none=True)


class ForwardReport(BaseModel):
    """Thermodynamic-limit description of one model."""
    params: ModelParams
    solutions: List[MeanFieldSolution]
    susceptibilities: List[Optional[SusceptibilityMatrix]]

    @property
    def stable_solutions(self) -> List[MeanFieldSolution]:
        return [s for s in self.solutions if s.stable]


class SizeScalingRow(BaseModel):
    """Exact finite-size values at one N and their distance to the limit."""
    n_spins: int
    m_n: float
    chi_n: float
    abs_err_m: float
    abs_err_chi: float


class ExactReport(BaseModel):
    """An exact distribution together with its moments."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    distribution: MagnetizationDistribution
    moments: ExactMoments


class SampleBatch(BaseModel):
    """Replicate samples and the seeds that produced them."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    seeds: List[int]
    samples: List[MagnetizationSample]


class FiniteSizeTable(BaseModel):
    """Exact (N, m_N, chi_N) values and the direction each column moves in."""
    coupling: float
    field: float
    sizes: List[int]
    m_n: List[float]
    chi_n: List[float]
    m_direction: str
    chi_direction: str


class SizeScalingStudy(BaseModel):
    """Finite-size behavior of m_N and chi_N for one (J, h)."""
    coupling: float
    field: float
    m_limit: float
    chi_limit: float
    rows: List[SizeScalingRow]
    m_direction: str
    chi_direction: str
    magnetization_fit: Optional[PowerLawFit] = None
    susceptibility_fit: Optional[PowerLawFit] = None
    degenerate: bool = False


class SampleScalingRow(BaseModel):
    """Replicate statistics of the estimators at one sample size M."""
    sample_count: int
    mean_m_exp: float
    std_m_exp: float
    mean_chi_exp: float
    std_chi_exp: float


class SampleScalingStudy(BaseModel):
    """Estimator noise as a function of the sample size."""
    params: CwParams
    replicates: int
    base_seed: int
    m_n: float
    chi_n: float
    rows: List[SampleScalingRow]
    magnetization_fit: PowerLawFit
    susceptibility_fit: PowerLawFit

    @property
    def magnetization_decay(self) -> float:
        return -self.magnetization_fit.exponent

    @property
    def susceptibility_decay(self) -> float:
        return -self.susceptibility_fit.exponent
