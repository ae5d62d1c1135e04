import json
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError
from merger.allocation import LocaleMix, WeightedLocale
from merger.brief import (
    BRIEF_FIELDS,
    FIELD_ALIASES,
    STAGE_FIELDS,
    FixtureBriefProvider,
    LoiParameters,
    ResearchBrief,
    Stage,
    StageProjection,
    brief_from_document,
    fill_placeholders,
    loi_success_probability,
    project_brief,
    render_brief_into_prompt,
    render_stage_prompts,
)
from merger.config import NormalizationConfig
from merger.errors import DomainError, FixtureError, MissingField

U, SIGMA, KAPPA, TAU, LAMBDA, M = "query_understanding", "source_strategy", "keyword_guidance", \
    "summary_style", "locale_hint", "locale_mix"


@pytest.fixture
def brief():
    return ResearchBrief(
        query_understanding="Q",
        source_strategy="S",
        keyword_guidance="K",
        summary_style="T",
        locale_hint="L",
        locale_mix=LocaleMix([WeightedLocale(country="tr", language="tr", weight=2)]),
    )


@pytest.mark.parametrize("stage,fields", [
    (Stage.SELECTION, {U, SIGMA}),
    (Stage.SUMMARY, {U, SIGMA, TAU}),
    (Stage.KEYWORD, {U, SIGMA, KAPPA, LAMBDA, M}),
])
def test_projection_fields(brief, stage, fields):
    assert set(project_brief(brief, stage)) == fields
    assert StageProjection.for_stage(stage).fields_present == fields


def test_render_examples():
    projection = {U: "Q", SIGMA: "S"}
    assert render_brief_into_prompt(projection, "Context: {u}\nStrategy: {σ}") == "Context: Q\nStrategy: S"
    with pytest.raises(MissingField):
        render_brief_into_prompt(projection, "Style: {τ}")
    assert render_brief_into_prompt({}, "static text") == "static text"


def test_doubled_braces_are_literals():
    assert render_brief_into_prompt({U: "Q"}, "{{json}} {u}") == "{json} Q"


EXCLUDED = [
    (stage, name)
    for stage in Stage
    for name in BRIEF_FIELDS
    if name not in STAGE_FIELDS[stage]
]
ALIAS_OF = {name: alias for alias, name in FIELD_ALIASES.items()}


@pytest.mark.parametrize("stage,name", EXCLUDED)
def test_excluded_field_cannot_be_rendered(brief, stage, name):
    projection = project_brief(brief, stage)
    for placeholder in (name, ALIAS_OF[name]):
        with pytest.raises(MissingField) as info:
            render_brief_into_prompt(projection, "prefix {" + placeholder + "}")
        assert info.value.field == placeholder


def test_excluded_pairs_are_exhaustive():
    assert len(EXCLUDED) == 1 + 4 + 3


def test_stage_prompts_render_locale_mix(brief):
    prompts = render_stage_prompts(brief)
    assert prompts["selection"] == "Context: Q\nStrategy: S"
    assert prompts["summary"].endswith("Style: T")
    assert prompts["keyword"].endswith("Locale hint: L\nLocale mix: tr-tr:2")


@pytest.mark.parametrize("alpha,beta,k,expected", [(1, 1, 1, 1.0), (0.5, 1, 2, 0.75), (0.9, 0.9, 1, 0.81)])
def test_convergence_values(alpha, beta, k, expected):
    assert loi_success_probability(LoiParameters(alpha=alpha, beta=beta, k=k)) == pytest.approx(expected, abs=1e-12)


def test_convergence_matches_closed_form_and_is_monotone():
    for ab in (0.05, 0.1, 0.3, 0.7):
        previous = 0.0
        for k in range(1, 25):
            p = loi_success_probability(LoiParameters(alpha=ab, beta=1.0, k=k))
            assert abs(p - (1 - (1 - ab) ** k)) < 1e-12
            assert p > previous
            previous = p
    assert abs(loi_success_probability(LoiParameters(alpha=0.25, beta=0.2, k=1000)) - 1) < 1e-9


@pytest.mark.parametrize("alpha,beta,k", [(0, 0.5, 1), (0.5, 1.5, 1), (0.5, 0.5, 0), (-1, 0.5, 3), (0.5, 0.5, True)])
def test_convergence_parameters_are_checked_on_the_model(alpha, beta, k):
    with pytest.raises(ValidationError):
        LoiParameters(alpha=alpha, beta=beta, k=k)
    with pytest.raises(DomainError):
        LoiParameters.build(alpha, beta, k)
    with pytest.raises(DomainError):
        loi_success_probability(LoiParameters.model_construct(alpha=alpha, beta=beta, k=k))


def test_domain_error_names_the_bad_parameter():
    with pytest.raises(DomainError, match="beta"):
        LoiParameters.build(0.5, 2.0, 3)
    assert LoiParameters.build(0.5, 1, 2) == LoiParameters(alpha=0.5, beta=1.0, k=2)


names = st.sampled_from(BRIEF_FIELDS)
texts = st.text(alphabet="abc {}xyz", max_size=6)


@given(st.dictionaries(names, texts, max_size=6), st.lists(names, max_size=5), st.integers(0, 6))
def test_partial_fills_compose(values, placeholders, split):
    template = " | ".join("{" + p + "}" for p in placeholders)
    keys = sorted(values)
    first = {k: values[k] for k in keys[:split]}
    second = {k: values[k] for k in keys[split:]}
    staged = fill_placeholders(fill_placeholders(template, first), second)
    assert staged == fill_placeholders(template, values)
    if set(placeholders) <= set(values):
        assert fill_placeholders(staged, {}, strict=True) == fill_placeholders(template, values, strict=True)


def test_brief_from_document_repairs_mix():
    document = {
        "query_understanding": None,
        "source_strategy": "S",
        "locale_mix": [{"country": "DE", "language": "de", "weight": 0}, {"country": "zz", "language": "qq"}],
    }
    result = brief_from_document(document, NormalizationConfig())
    assert result.query_understanding == ""
    assert result.locale_mix.render() == "de-de:1, tr-tr:1"


def test_fixture_provider_reads_text_and_reports_errors():
    text = json.dumps({"query_understanding": "Q", "locale_mix": []})
    assert FixtureBriefProvider(text=text).get_brief(NormalizationConfig()).locale_mix.render() == "tr-tr:1"
    with pytest.raises(FixtureError):
        FixtureBriefProvider(text="{not json").get_brief(NormalizationConfig())
    with pytest.raises(FixtureError):
        FixtureBriefProvider(text="[1, 2]").get_brief(NormalizationConfig())
    with pytest.raises(FixtureError):
        FixtureBriefProvider(path="/nonexistent/brief.json").get_brief(NormalizationConfig())
