"""Pydantic request/response models for the service; rationals travel as "p/q"."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

Rational = str  # "p/q"


class SpaceModel(BaseModel):
    points: list[str]
    dist: list[list[Rational]]
    weight: list[Rational]
    provenance: str = ""


class DescriptorModel(BaseModel):
    kind: str
    params: dict[str, Any] = Field(default_factory=dict)


class BuildRequest(BaseModel):
    descriptor: DescriptorModel


class BuildResponse(BaseModel):
    space: SpaceModel
    n_points: int
    total_measure: Rational
    diameter: Rational
    valid: bool


class ValidateRequest(BaseModel):
    space: SpaceModel


class ViolationModel(BaseModel):
    kind: str
    where: list[int]


class ValidateResponse(BaseModel):
    ok: bool
    violations: list[ViolationModel]


class EvalRequest(BaseModel):
    space: SpaceModel
    op: Literal["c", "nc"]
    k: Rational
    f: list[Rational]
    oracle_samples: Optional[int] = None  # use the dense-sampling oracle instead


class WitnessModel(BaseModel):
    center: int
    radius: Rational


class EvalResponse(BaseModel):
    op_kind: str
    k: Rational
    values: list[Rational]
    witnesses: list[WitnessModel]


class RatioRequest(BaseModel):
    space: SpaceModel
    k: Rational
    p: str  # "p/q" or "inf"
    kind: Literal["weak", "strong"]
    op: Literal["c", "nc"]
    f: list[Rational]


class RatioResponse(BaseModel):
    value: float
    exact_value: Optional[Rational] = None


class EstimateRequest(BaseModel):
    space: SpaceModel
    k: Rational
    p: str
    kind: Literal["weak", "strong"]
    op: Literal["c", "nc"]
    restarts: int = 8
    iters: int = 4
    seed: int = 0


class EstimateResponse(BaseModel):
    delta_scan: dict
    estimate: dict


class ReproduceRequest(BaseModel):
    params: dict[str, Any] = Field(default_factory=dict)


class ReproduceResponse(BaseModel):
    report: dict


class SweepRequest(BaseModel):
    spaces: list[DescriptorModel]
    k_grid: list[Rational]
    p_grid: list[str]
    kinds: list[Literal["weak", "strong"]] = ["weak", "strong"]
    op_kinds: list[Literal["centered", "noncentered"]] = ["centered", "noncentered"]
    budget: dict[str, Any] = Field(default_factory=dict)
    seed: int = 0


class SweepResponse(BaseModel):
    rows: list[dict]
    csv: str
