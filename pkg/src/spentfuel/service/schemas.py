"""Pydantic request/response models for the service endpoints."""

from __future__ import annotations

from pydantic import BaseModel, Field, field_validator

N_INPUTS = 5

# Reference center: the built-in base assembly's own parameters.
DEFAULT_CENTER = [3.095, 35.72, 887.0, 310.75, 2068.0]


class HealthResponse(BaseModel):
    status: str
    tool_version: str
    chain_version: str


class GenerateRequest(BaseModel):
    n: int = Field(gt=0)
    seed: int = 0
    out_path: str
    chain_path: str | None = None
    workers: int | None = Field(default=None, ge=1)


class GenerateResponse(BaseModel):
    rows: int
    out_path: str
    meta_path: str
    seed: int


class SpaceOverrides(BaseModel):
    """Optional shrunken search space, mainly for small or fast runs."""

    hidden_layers: tuple[int, int] | None = None
    hidden_dim: tuple[int, int] | None = None
    learning_rate: tuple[float, float] | None = None
    batch_sizes: list[int] | None = None
    max_epochs: int | None = Field(default=None, ge=1)


class SplitSettings(BaseModel):
    test_count: int = Field(default=200, gt=0)
    val_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    seed: int = 0


class TrialInfo(BaseModel):
    index: int
    seed: int
    hidden_layers: int
    hidden_dim: int
    learning_rate: float
    batch_size: int
    objective: float | None
    stopped_epoch: int
    diverged: bool


class TuneRequest(BaseModel):
    data_path: str
    budget: int = Field(default=50, ge=1)
    seed: int = 0
    log_path: str | None = None
    space: SpaceOverrides | None = None
    split: SplitSettings = SplitSettings()
    patience: int = Field(default=50, ge=1)
    max_seconds_per_trial: float | None = Field(default=None, gt=0.0)


class TuneResponse(BaseModel):
    best: TrialInfo
    trials: list[TrialInfo]
    log_path: str | None


class TrainSettings(BaseModel):
    hidden_layers: int = Field(default=1, ge=1)
    hidden_dim: int = Field(default=256, ge=1)
    learning_rate: float = Field(default=1.3e-3, gt=0.0)
    batch_size: int = Field(default=16, ge=1)
    max_epochs: int = Field(default=1000, ge=1)
    patience: int = Field(default=50, ge=1)
    seed: int = 0
    max_seconds: float | None = Field(default=None, gt=0.0)


class TrainRequest(BaseModel):
    data_path: str
    out_path: str
    settings: TrainSettings = TrainSettings()
    split: SplitSettings = SplitSettings()


class TrainResponse(BaseModel):
    model_path: str
    stopped_epoch: int
    best_epoch: int
    val_mse: float
    trailing_val_mse: float
    test_mse: float
    test_r2: float
    train_seconds: float


class PredictRequest(BaseModel):
    model_path: str
    inputs: list[list[float]]

    @field_validator("inputs")
    @classmethod
    def _five_wide(cls, rows):
        if not rows:
            raise ValueError("inputs must carry at least one row")
        for row in rows:
            if len(row) != N_INPUTS:
                raise ValueError(f"each input row needs {N_INPUTS} values")
        return rows


class PredictResponse(BaseModel):
    labels: list[str]
    predictions: list[list[float]]
    seconds_per_prediction: float


class UqRequest(BaseModel):
    model_path: str | None = None
    use_oracle: bool = False
    center: list[float] = Field(default_factory=lambda: list(DEFAULT_CENTER))
    rel_std: float = Field(default=0.05, gt=0.0)
    n_samples: int = Field(default=1000, ge=2)
    seed: int = 0
    out_dir: str
    chain_path: str | None = None
    bootstrap_resamples: int = Field(default=1000, ge=1)

    @field_validator("center")
    @classmethod
    def _center_width(cls, center):
        if len(center) != N_INPUTS:
            raise ValueError(f"center needs {N_INPUTS} values")
        return center


class UqRow(BaseModel):
    output: str
    evaluator: str
    mean: float
    std: float
    rel_std: float
    boot_mean_std: float
    boot_var_std: float


class UqResponse(BaseModel):
    evaluators: list[str]
    n_samples: int
    summary: list[UqRow]
    files: list[str]


class SaRequest(BaseModel):
    model_path: str | None = None
    use_oracle: bool = False
    center: list[float] = Field(default_factory=lambda: list(DEFAULT_CENTER))
    rel_std: float = Field(default=0.05, gt=0.0)
    n_base: int = Field(default=128, ge=2)
    seed: int = 0
    out_dir: str
    chain_path: str | None = None
    bootstrap_resamples: int = Field(default=200, ge=1)

    @field_validator("center")
    @classmethod
    def _center_width(cls, center):
        if len(center) != N_INPUTS:
            raise ValueError(f"center needs {N_INPUTS} values")
        return center


class SaIndexTable(BaseModel):
    evaluator: str
    s1: list[list[float]]  # (input, output)
    st: list[list[float]]
    s1_se: list[list[float]]
    st_se: list[list[float]]
    undefined_outputs: list[str]
    burnup_has_largest_total_order_for_decay_heat: bool


class SaResponse(BaseModel):
    evaluators: list[str]
    n_base: int
    n_evaluations: int
    input_names: list[str]
    output_labels: list[str]
    tables: list[SaIndexTable]
    files: list[str]


class BenchRequest(BaseModel):
    model_path: str
    n: int = Field(default=5072, ge=1)
    probes: int = Field(default=10, ge=1)
    n_train: int = Field(default=500, ge=1)
    chain_path: str | None = None
    seed: int = 0


class BenchResponse(BaseModel):
    t_oracle: float
    t_oracle_std: float
    t_train: float
    t_eval: float
    t_eval_std: float
    n_train: int
    speedup_at_n: float
    n: int
    break_even_n: float


class CompareRequest(BaseModel):
    pred_path: str
    meas_path: str
    out_prefix: str | None = None


class CeRecordRow(BaseModel):
    assembly_id: str
    group: str
    cooling_years: float
    measured: float
    calculated: float
    ratio: float


class CompareResponse(BaseModel):
    n_records: int
    records: list[CeRecordRow]
    group_bias_pct: dict[str, float]
    overall_bias_pct: float
    files: list[str]
