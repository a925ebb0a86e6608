"""FastAPI application wrapping the core package."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import SpentFuelError
from . import ops
from . import schemas as s

app = FastAPI(title="spentfuel", version=__version__)


@app.exception_handler(SpentFuelError)
async def _domain_error(_request: Request, exc: SpentFuelError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ValueError)
async def _value_error(_request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health", response_model=s.HealthResponse)
def health() -> s.HealthResponse:
    return ops.health()


@app.post("/generate", response_model=s.GenerateResponse)
def generate(req: s.GenerateRequest) -> s.GenerateResponse:
    return ops.generate(req)


@app.post("/tune", response_model=s.TuneResponse)
def tune(req: s.TuneRequest) -> s.TuneResponse:
    return ops.tune(req)


@app.post("/train", response_model=s.TrainResponse)
def train(req: s.TrainRequest) -> s.TrainResponse:
    return ops.train(req)


@app.post("/predict", response_model=s.PredictResponse)
def predict(req: s.PredictRequest) -> s.PredictResponse:
    return ops.predict(req)


@app.post("/uq", response_model=s.UqResponse)
def uq(req: s.UqRequest) -> s.UqResponse:
    return ops.uq(req)


@app.post("/sa", response_model=s.SaResponse)
def sa(req: s.SaRequest) -> s.SaResponse:
    return ops.sa(req)


@app.post("/bench", response_model=s.BenchResponse)
def run_bench(req: s.BenchRequest) -> s.BenchResponse:
    return ops.run_bench(req)


@app.post("/compare", response_model=s.CompareResponse)
def compare(req: s.CompareRequest) -> s.CompareResponse:
    return ops.compare(req)
