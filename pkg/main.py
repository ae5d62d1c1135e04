import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence
import structlog
from pydantic import BaseModel, ValidationError
from backend.brief_service import OpenAIBriefProvider
from harness.ablation import run_ablation
from harness.fixtures import load_fixtures, parse_labeled
from harness.pipeline import run_pipeline, select_from_fixtures
from merger.allocation import LocaleMix, allocate_locale_counts
from merger.brief import FixtureBriefProvider, LoiParameters, loi_success_probability
from merger.cascade import infer_country
from merger.config import CascadeConfig, NormalizationConfig, PipelineConfig, SelectionConfig
from merger.errors import FixtureError, LocaleMergeError
from merger.logs import configure_logging
from merger.metrics import compute_metrics, label_sources
from merger.model import Source

logger = structlog.get_logger(__name__)


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FixtureError(f"cannot read {path}: {e}") from e


def _emit(value: Any) -> None:
    if isinstance(value, BaseModel):
        value = value.model_dump(mode="json")
    print(json.dumps(value, indent=2, ensure_ascii=False))


def _cascade(args) -> CascadeConfig:
    data = {}
    if getattr(args, "overrides", None):
        data["overrides"] = _read_json(args.overrides)
    if getattr(args, "fallback", None):
        data["fallback"] = _read_json(args.fallback)
    return CascadeConfig.model_validate(data)


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(
        selection=SelectionConfig(kappa=args.kappa, max_sources=args.max_sources),
        normalization=NormalizationConfig.for_budget(args.total, args.max_locales),
        cascade=_cascade(args),
        use_relevance_scores=args.scored,
        seed=args.seed,
        virtual_clock=args.virtual_clock,
        blocked_domains=args.block,
    )


def cmd_allocate(args) -> None:
    mix = _read_json(args.mix)
    try:
        mix = LocaleMix.parse_strict(mix)
    except ValidationError as e:
        raise FixtureError(f"invalid locale mix: {e}") from e
    _emit(allocate_locale_counts(mix, args.total))


def cmd_infer_country(args) -> None:
    source = Source(url=args.url, publisher_country=args.publisher_country, language=args.language)
    _emit(infer_country(source, _cascade(args)))


def cmd_select(args) -> None:
    config = PipelineConfig(
        selection=SelectionConfig(kappa=args.kappa, max_sources=args.max_sources),
        use_relevance_scores=args.scored,
        seed=args.seed,
    )
    _emit(asyncio.run(select_from_fixtures(load_fixtures(args.fixtures), config)))


def cmd_metrics(args) -> None:
    items = parse_labeled(_read_json(args.labeled))
    sources = [item.to_source(rank) for rank, item in enumerate(items)]
    labeled = label_sources(sources, {i.url: i.is_first_party for i in items}, _cascade(args))
    _emit(compute_metrics(labeled))


def cmd_convergence(args) -> None:
    params = LoiParameters.build(args.alpha, args.beta, args.k)
    _emit({"probability": loi_success_probability(params)})


def _brief(args, config: PipelineConfig):
    if args.brief:
        return FixtureBriefProvider(path=args.brief).get_brief(config.normalization)
    if args.query:
        return OpenAIBriefProvider(args.query, model=args.model).get_brief(config.normalization)
    raise FixtureError("give --brief or --query")


def cmd_simulate(args) -> None:
    config = _pipeline_config(args)
    fixtures = load_fixtures(args.fixtures)
    run = run_pipeline(_brief(args, config), fixtures, config)
    sys.stdout.write(run.to_json())


def cmd_compare(args) -> None:
    config = _pipeline_config(args)
    fixtures = load_fixtures(args.fixtures)
    _emit([r.model_dump(mode="json") for r in run_ablation(_brief(args, config), fixtures, config)])


def cmd_serve(args) -> None:
    import uvicorn
    uvicorn.run("backend.app:app", host=args.host, port=args.port, reload=args.reload)


def _add_cascade_files(p: argparse.ArgumentParser) -> None:
    p.add_argument("--overrides", help="JSON object mapping TLD -> country code")
    p.add_argument("--fallback", help="JSON object mapping language -> country code")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--brief", help="Research brief JSON file")
    p.add_argument("--query", help="Generate the brief from this query with a chat model instead of --brief")
    p.add_argument("--model", default="qwen-plus", help="Chat model used with --query")
    p.add_argument("--fixtures", required=True, help="Fixture JSON file")
    p.add_argument("--kappa", type=int, default=1, help="Max selected sources per registrable domain")
    p.add_argument("--total", type=int, default=8, help="Total keyword budget")
    p.add_argument("--max-locales", type=int, help="Max locales kept from the brief (default: min(4, total))")
    p.add_argument("--max-sources", type=int, default=8, help="Max selected sources")
    p.add_argument("--seed", type=int, default=0, help="Virtual clock seed")
    p.add_argument("--virtual-clock", action="store_true", help="Simulate latencies instead of waiting")
    p.add_argument("--scored", action="store_true", help="Rank by fixture relevance scores")
    p.add_argument("--block", action="append", default=[], metavar="DOMAIN",
                   help="Registrable domain the selection may not pick (repeatable; compare uses it as its blacklist)")
    _add_cascade_files(p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description="Merge multi-locale search results into one diverse source set")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="Split a keyword budget across a locale mix")
    p.add_argument("--mix", required=True, help="JSON array of {country, language, weight}")
    p.add_argument("--total", type=int, required=True)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("infer-country", help="Infer a source's country from its URL and metadata")
    p.add_argument("--url", required=True)
    p.add_argument("--publisher-country")
    p.add_argument("--language")
    _add_cascade_files(p)
    p.set_defaults(func=cmd_infer_country)

    p = sub.add_parser("select", help="Run diversity selection over a fixture file")
    p.add_argument("--fixtures", required=True)
    p.add_argument("--kappa", type=int, default=1)
    p.add_argument("--max-sources", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scored", action="store_true")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("metrics", help="FPR / DDR / LC of a labeled source list")
    p.add_argument("--labeled", required=True)
    _add_cascade_files(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("convergence", help="Probability that the brief's objective is picked up")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("simulate", help="Run the full pipeline over fixtures")
    _add_run_options(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="Run baseline / no_brief / full / explicit_constraint configurations side by side")
    _add_run_options(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="Serve the HTTP API")
    p.add_argument("--host", default="localhost")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--reload", action="store_true")
    p.set_defaults(func=cmd_serve)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    logger.debug("running command", command=args.command)
    try:
        args.func(args)
    except FixtureError as e:
        print(f"[error] {e}", file=sys.stderr)
        return 2
    except (LocaleMergeError, ValidationError) as e:
        print(f"[error] {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
