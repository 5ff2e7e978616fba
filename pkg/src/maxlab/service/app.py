"""FastAPI service exposing the lab over HTTP; the CLI is a thin client of it."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..constants import ascent_search, delta_scan, ratio, with_upper
from ..constructions import build_space
from ..experiments import EXPERIMENT_NAMES, reproduce, sweep
from ..maximal import (
    TestFunction,
    m_centered,
    m_centered_oracle,
    m_noncentered,
    m_noncentered_oracle,
)
from ..rationals import format_rational
from ..spaces import MetricMeasureSpace, diameter, total_measure, validate_metric
from . import schemas


def _space(model: schemas.SpaceModel) -> MetricMeasureSpace:
    try:
        return MetricMeasureSpace.from_json_dict(model.model_dump())
    except (ValueError, ZeroDivisionError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="maxlab", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/spaces/build", response_model=schemas.BuildResponse)
    def build(req: schemas.BuildRequest) -> schemas.BuildResponse:
        try:
            space = build_space(req.descriptor.model_dump())
        except (ValueError, KeyError, ZeroDivisionError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        report = validate_metric(space)
        return schemas.BuildResponse(
            space=schemas.SpaceModel(**space.to_json_dict()),
            n_points=space.n,
            total_measure=format_rational(total_measure(space)),
            diameter=format_rational(diameter(space)) if space.n else "0/1",
            valid=report.ok,
        )

    @app.post("/spaces/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
        report = validate_metric(_space(req.space))
        return schemas.ValidateResponse(
            ok=report.ok,
            violations=[
                schemas.ViolationModel(kind=v.kind, where=list(v.where)) for v in report.violations
            ],
        )

    @app.post("/eval", response_model=schemas.EvalResponse)
    def evaluate(req: schemas.EvalRequest) -> schemas.EvalResponse:
        space = _space(req.space)
        try:
            f = TestFunction.coerce(space, req.f)
            if req.oracle_samples is not None:
                op = m_centered_oracle if req.op == "c" else m_noncentered_oracle
                values = op(space, req.k, f, req.oracle_samples)
            else:
                op = m_centered if req.op == "c" else m_noncentered
                values = op(space, req.k, f)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        data = values.to_json_dict()
        return schemas.EvalResponse(**data)

    @app.post("/ratio", response_model=schemas.RatioResponse)
    def ratio_endpoint(req: schemas.RatioRequest) -> schemas.RatioResponse:
        space = _space(req.space)
        op_kind = "centered" if req.op == "c" else "noncentered"
        try:
            f = TestFunction.coerce(space, req.f)
            result = ratio(space, req.k, req.p, req.kind, op_kind, f)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return schemas.RatioResponse(
            value=result.value,
            exact_value=format_rational(result.exact_value) if result.exact_value is not None else None,
        )

    @app.post("/estimate", response_model=schemas.EstimateResponse)
    def estimate(req: schemas.EstimateRequest) -> schemas.EstimateResponse:
        space = _space(req.space)
        op_kind = "centered" if req.op == "c" else "noncentered"
        try:
            scan = with_upper(delta_scan(space, req.k, req.p, req.kind, op_kind), space)
            est = with_upper(
                ascent_search(
                    space, req.k, req.p, req.kind, op_kind, req.restarts, req.iters, req.seed
                ),
                space,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return schemas.EstimateResponse(delta_scan=scan.to_json_dict(), estimate=est.to_json_dict())

    @app.post("/reproduce/{name}", response_model=schemas.ReproduceResponse)
    def reproduce_endpoint(name: str, req: schemas.ReproduceRequest) -> schemas.ReproduceResponse:
        if name not in EXPERIMENT_NAMES:
            raise HTTPException(status_code=404, detail=f"unknown experiment {name!r}")
        try:
            report = reproduce(name, req.params)
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return schemas.ReproduceResponse(report=report)

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep_endpoint(req: schemas.SweepRequest) -> schemas.SweepResponse:
        try:
            result = sweep(
                [(f"space{i}", d.model_dump()) for i, d in enumerate(req.spaces)],
                req.k_grid,
                req.p_grid,
                req.kinds,
                req.op_kinds,
                req.budget,
                req.seed,
            )
        except (ValueError, KeyError, ZeroDivisionError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return schemas.SweepResponse(rows=result["rows"], csv=result["csv"])

    return app


app = create_app()
