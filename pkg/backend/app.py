from typing import Any, Optional
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field
import structlog
from harness.fixtures import parse_fixtures, parse_labeled
from harness.pipeline import PipelineRun, run_pipeline_async, select_from_fixtures
from merger.allocation import AllocationVector, LocaleMix, allocate_locale_counts
from merger.brief import LoiParameters, brief_from_document, loi_success_probability
from merger.cascade import InferenceResult, infer_country
from merger.config import CascadeConfig, NormalizationConfig, PipelineConfig, SelectionConfig
from merger.diversity import SelectionReport
from merger.logs import configure_logging
from merger.metrics import MetricsReport, compute_metrics, label_sources
from merger.model import Source

configure_logging()
logger = structlog.get_logger(__name__)
app = FastAPI(title="localemerge")


class AllocateRequest(BaseModel):
    mix: LocaleMix
    total: int = Field(..., description="Total keyword budget T.")


class InferRequest(BaseModel):
    url: str
    publisher_country: Optional[str] = None
    language: Optional[str] = None
    overrides: Optional[dict[str, str]] = None
    fallback: Optional[dict[str, str]] = None


class SelectRequest(BaseModel):
    fixtures: dict[str, Any]
    kappa: int = 1
    max_sources: int = 8
    scored: bool = False


class MetricsRequest(BaseModel):
    labeled: list[dict[str, Any]]


class ConvergenceResponse(BaseModel):
    probability: float


class SimulateRequest(BaseModel):
    brief: dict[str, Any]
    fixtures: dict[str, Any]
    kappa: int = 1
    total: int = 8
    max_locales: Optional[int] = Field(None, description="Defaults to min(4, total).")
    max_sources: int = 8
    seed: int = 0
    scored: bool = False
    blocked_domains: list[str] = Field(default_factory=list)


def cascade_config(overrides: Optional[dict[str, str]] = None, fallback: Optional[dict[str, str]] = None) -> CascadeConfig:
    data: dict[str, Any] = {}
    if overrides is not None:
        data["overrides"] = overrides
    if fallback is not None:
        data["fallback"] = fallback
    return CascadeConfig.model_validate(data)


def _fail(e: Exception) -> HTTPException:
    # LocaleMergeError and pydantic ValidationError are both ValueErrors
    if isinstance(e, ValueError):
        logger.info("request rejected", error=str(e))
        return HTTPException(status_code=422, detail=str(e))
    logger.error("request failed", error=str(e))
    return HTTPException(status_code=500, detail=str(e))


@app.post("/allocate", response_model=AllocationVector)
def allocate(request: AllocateRequest):
    try:
        return allocate_locale_counts(request.mix, request.total)
    except Exception as e:
        raise _fail(e)


@app.post("/infer_country", response_model=InferenceResult)
def infer(request: InferRequest):
    try:
        source = Source(url=request.url, publisher_country=request.publisher_country, language=request.language)
        return infer_country(source, cascade_config(request.overrides, request.fallback))
    except Exception as e:
        raise _fail(e)


@app.post("/select", response_model=SelectionReport)
async def select(request: SelectRequest):
    try:
        config = PipelineConfig(
            selection=SelectionConfig(kappa=request.kappa, max_sources=request.max_sources),
            use_relevance_scores=request.scored,
        )
        return await select_from_fixtures(parse_fixtures(request.fixtures), config)
    except Exception as e:
        raise _fail(e)


@app.post("/metrics", response_model=MetricsReport)
def metrics(request: MetricsRequest):
    try:
        items = parse_labeled(request.labeled)
        sources = [item.to_source(rank) for rank, item in enumerate(items)]
        labeled = label_sources(sources, {i.url: i.is_first_party for i in items})
        return compute_metrics(labeled)
    except Exception as e:
        raise _fail(e)


@app.post("/convergence", response_model=ConvergenceResponse)
def convergence(params: LoiParameters):
    try:
        return ConvergenceResponse(probability=loi_success_probability(params))
    except Exception as e:
        raise _fail(e)


@app.post("/simulate", response_model=PipelineRun)
async def simulate(request: SimulateRequest):
    try:
        config = PipelineConfig(
            selection=SelectionConfig(kappa=request.kappa, max_sources=request.max_sources),
            normalization=NormalizationConfig.for_budget(request.total, request.max_locales),
            use_relevance_scores=request.scored,
            seed=request.seed,
            blocked_domains=request.blocked_domains,
        )
        brief = brief_from_document(request.brief, config.normalization)
        return await run_pipeline_async(brief, parse_fixtures(request.fixtures), config)
    except Exception as e:
        raise _fail(e)
