from __future__ import annotations
from typing import List, Literal, Optional, Tuple, Union
from pydantic import AliasChoices, BaseModel, Field, model_validator
from typing_extensions import Annotated

# ------ Degree distributions ------
class PowerLawCutoff(BaseModel):
    """p_d proportional to d^-alpha * exp(-lambda d) on {d_min, ..., d_max}."""
    kind: Literal["power_law_cutoff"] = "power_law_cutoff"
    d_min: int = 3
    alpha: float = 2.5
    lam: float = Field(1e-5, validation_alias=AliasChoices("lam", "lambda"))
    d_max: int = 10_000

class LogNormal(BaseModel):
    """p_d proportional to the log-normal density at d, on {1, ..., d_max}."""
    kind: Literal["log_normal"] = "log_normal"
    theta: float = 2.0
    sigma: float = 0.5
    d_max: int = 10_000

class Explicit(BaseModel):
    kind: Literal["explicit"] = "explicit"
    pmf: List[Tuple[int, float]]
    d_max: Optional[int] = None

DegreeModel = Annotated[Union[PowerLawCutoff, LogNormal, Explicit], Field(discriminator="kind")]

# ------ Process configs ------
class TraitConfig(BaseModel):
    prevalence: float = Field(0.15, gt=0.0, lt=1.0)
    swap_prob: float = Field(0.2, ge=0.0, le=1.0)

class TeleportConfig(BaseModel):
    # probability of following an edge; 1 - c is the jump probability
    c: float = Field(..., ge=0.0, le=1.0)

class RdsSettings(BaseModel):
    coupons: int = Field(3, ge=1)
    target_size: int = Field(300, ge=1)
    replenish_seeds: bool = False

class RdsConfig(RdsSettings):
    num_seeds: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _seeds_fit_sample(self) -> "RdsConfig":
        if self.num_seeds > self.target_size:
            raise ValueError(f"num_seeds={self.num_seeds} exceeds target_size={self.target_size}")
        return self

# ------ Reports ------
class GenerationReport(BaseModel):
    n: int
    components: int = 1
    drawn_mean_degree: float
    realized_mean_degree: float
    erased_self_loops: int
    collapsed_multiedges: int
    dropped_stubs: int = 0
    seed: Optional[int] = None
    prevalence: Optional[float] = None

class IngestReport(BaseModel):
    vertices: int
    edges: int
    duplicate_edges: int = 0
    self_loops: int = 0

DegenerateFlag = Literal["single_seed", "single_nonseed", "zero_variance_both", "no_nonseeds", "all_seeds", "no_seeds"]

class EstimateReport(BaseModel):
    n_s: int
    m: int
    c_hat: float
    ed_seeds: Optional[float] = None
    var_ed_seeds: Optional[float] = None
    ed_rw: Optional[float] = None
    var_ed_rw: Optional[float] = None
    w_star: float
    ed_hat: float
    weights: List[float] = Field(default_factory=list)
    mu_t: float
    mu_vh: float
    mu_sm: float
    degenerate_flags: List[DegenerateFlag] = Field(default_factory=list)
    seeds_excluded: bool = False

# ------ Experiments ------
class NetworkSpec(BaseModel):
    model: Optional[DegreeModel] = None
    n: int = Field(10_000, ge=2)
    components: Literal[1, 2] = 1
    # real networks: edge list + attribute file, trait column picked by name
    edge_list: Optional[str] = None
    attributes: Optional[str] = None
    trait: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self) -> "NetworkSpec":
        if self.edge_list is None and self.model is None:
            raise ValueError("network needs either a degree model or an edge_list")
        if self.edge_list is not None and self.attributes is None:
            raise ValueError("edge_list networks need an attributes file")
        return self

class ExperimentSpec(BaseModel):
    network: NetworkSpec
    trait: TraitConfig = Field(default_factory=TraitConfig)
    rds: RdsSettings = Field(default_factory=RdsSettings)
    seed_counts: List[int] = Field(default_factory=lambda: [1, 2, 5, 10, 15, 20, 30, 45, 60])
    replications_per_network: int = Field(50, ge=1)
    network_samples: int = Field(20, ge=1)
    master_seed: int = 20240101

    @model_validator(mode="after")
    def _counts_valid(self) -> "ExperimentSpec":
        if not self.seed_counts:
            raise ValueError("seed_counts is empty")
        bad = [m for m in self.seed_counts if m < 1 or m > self.rds.target_size]
        if bad:
            raise ValueError(f"seed counts {bad} outside [1, target_size={self.rds.target_size}]")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        return self

    @classmethod
    def single_component_preset(cls, degrees: str = "power-law", **overrides) -> "ExperimentSpec":
        model = PowerLawCutoff() if degrees == "power-law" else LogNormal()
        return cls(network=NetworkSpec(model=model, n=10_000, components=1), **overrides)

    @classmethod
    def two_component_preset(cls, degrees: str = "power-law", **overrides) -> "ExperimentSpec":
        model = PowerLawCutoff() if degrees == "power-law" else LogNormal()
        return cls(network=NetworkSpec(model=model, n=10_000, components=2), **overrides)

class AggregateRow(BaseModel):
    m: int
    estimator: Literal["T", "VH", "SM"]
    mean: float
    std_error: float = Field(..., ge=0.0)
    replicates: int
    true_prevalence: float

class ReplicationFailure(BaseModel):
    network: int
    m: int
    replication: int
    error: str
    detail: str

class ExperimentResult(BaseModel):
    rows: List[AggregateRow]
    replications_total: int
    replications_failed: int
    failures: List[ReplicationFailure] = Field(default_factory=list)
