"""Weighted locale allocation and locale-mix normalization.

`apportion` is the three-phase largest-remainder procedure: one slot per locale,
then floor shares of the remaining budget proportional to weight, then the
leftover slots to the largest fractional parts (ties go to the earlier locale).
"""
from fractions import Fraction
from typing import Any, Iterable, Sequence
import structlog
from pydantic import BaseModel, ConfigDict, RootModel, model_validator
from .config import NormalizationConfig, PositiveInt
from .errors import BudgetTooSmall, InvalidWeight
from .model import CountryCode, LanguageCode, Locale, coerce_country, coerce_language

logger = structlog.get_logger(__name__)


class WeightedLocale(BaseModel):
    model_config = ConfigDict(frozen=True)

    country: CountryCode
    language: LanguageCode
    weight: PositiveInt

    @property
    def locale(self) -> Locale:
        return Locale(country=self.country, language=self.language)

    @property
    def tag(self) -> str:
        return f"{self.country}-{self.language}"


class LocaleMix(RootModel[list[WeightedLocale]]):
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _non_empty_unique(self):
        if not self.root:
            raise ValueError("locale mix must contain at least one locale")
        tags = [e.tag for e in self.root]
        if len(set(tags)) != len(tags):
            raise ValueError(f"locale mix contains duplicate locales: {tags}")
        return self

    @property
    def entries(self) -> list[WeightedLocale]:
        return self.root

    def render(self) -> str:
        return ", ".join(f"{e.tag}:{e.weight}" for e in self.root)

    @classmethod
    def parse_strict(cls, document: Any) -> "LocaleMix":
        """Validate a caller-supplied mix as is; a bad weight raises InvalidWeight."""
        if isinstance(document, list):
            check_weights([e.get("weight", 1) for e in document if isinstance(e, dict)])
        return cls.model_validate(document)


class LocaleCount(BaseModel):
    model_config = ConfigDict(frozen=True)

    country: CountryCode
    language: LanguageCode
    weight: PositiveInt
    count: PositiveInt

    @property
    def locale(self) -> Locale:
        return Locale(country=self.country, language=self.language)


def is_feasible_allocation(weights: Sequence[int], total: int, counts: Sequence[int]) -> bool:
    """Exact check of minimum representation, budget and proportionality."""
    n = len(weights)
    if n == 0 or len(counts) != n or total < n:
        return False
    if any(c < 1 for c in counts) or sum(counts) != total:
        return False
    w_sum = sum(weights)
    for w, c in zip(weights, counts):
        ideal = 1 + Fraction((total - n) * w, w_sum)
        if abs(c - ideal) >= 1:
            return False
    return True


class AllocationVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    counts: list[LocaleCount]
    total: PositiveInt
    weight_sum: PositiveInt

    @model_validator(mode="after")
    def _constraints_hold(self):
        weights = [c.weight for c in self.counts]
        if sum(weights) != self.weight_sum:
            raise ValueError("weight_sum does not match the per-locale weights")
        if not is_feasible_allocation(weights, self.total, [c.count for c in self.counts]):
            raise ValueError(f"allocation {[c.count for c in self.counts]} violates the allocation constraints")
        return self


def check_weights(weights: Sequence[Any]) -> None:
    bad = [w for w in weights if not isinstance(w, int) or isinstance(w, bool) or w < 1]
    if bad:
        raise InvalidWeight(f"weights must be integers >= 1, got {bad}")


def apportion(weights: Sequence[int], total: int) -> list[int]:
    n = len(weights)
    if n == 0:
        raise InvalidWeight("at least one weight is required")
    check_weights(weights)
    if total < n:
        raise BudgetTooSmall(f"total budget {total} is smaller than the number of locales {n}")

    remaining = total - n
    w_sum = sum(weights)
    counts = [1] * n
    remainders = []
    for i, w in enumerate(weights):
        # integer quotient/remainder keep the fractional ordering exact
        q, r = divmod(w * remaining, w_sum)
        counts[i] += q
        remainders.append(r)
    leftover = total - sum(counts)
    order = sorted(range(n), key=lambda i: -remainders[i])  # stable: lower index wins ties
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def allocate_locale_counts(mix: LocaleMix, total: int) -> AllocationVector:
    entries = mix.entries
    counts = apportion([e.weight for e in entries], total)
    logger.debug("allocated locale counts", total=total, counts={e.tag: c for e, c in zip(entries, counts)})
    return AllocationVector(
        counts=[
            LocaleCount(country=e.country, language=e.language, weight=e.weight, count=c)
            for e, c in zip(entries, counts)
        ],
        total=total,
        weight_sum=sum(e.weight for e in entries),
    )


def _raw_triple(entry: Any) -> tuple[Any, Any, Any]:
    if isinstance(entry, dict):
        return entry.get("country"), entry.get("language"), entry.get("weight", 1)
    country, language, weight = entry
    return country, language, weight


def _clamp_weight(weight: Any) -> int:
    try:
        w = int(weight)
    except (TypeError, ValueError, OverflowError):
        return 1
    return max(1, w)


def normalize_locale_mix(raw: Iterable[Any], config: NormalizationConfig) -> LocaleMix:
    """Repair an upstream locale mix; never fails.

    Invalid codes are dropped, duplicates keep their first occurrence, weights are
    clamped to >= 1, the default locale is injected with weight 1 when missing, and
    the mix is cut to `max_locales` keeping the heaviest entries (earlier wins ties)
    while the default locale is always kept.
    """
    default = config.default_locale
    kept: list[tuple[str, str, int]] = []
    seen: set[tuple[str, str]] = set()
    for entry in raw or []:
        try:
            country, language, weight = _raw_triple(entry)
        except (TypeError, ValueError):
            logger.info("dropping unreadable locale entry", entry=repr(entry))
            continue
        cc, lc = coerce_country(country), coerce_language(language)
        if cc is None or lc is None:
            logger.info("dropping invalid locale", country=country, language=language)
            continue
        if (cc, lc) in seen:
            continue
        seen.add((cc, lc))
        kept.append((cc, lc, _clamp_weight(weight)))

    default_key = (default.country, default.language)
    if default_key not in seen:
        kept.append((default.country, default.language, 1))

    if len(kept) > config.max_locales:
        others = [i for i, (c, l, _) in enumerate(kept) if (c, l) != default_key]
        by_weight = sorted(others, key=lambda i: -kept[i][2])
        survivors = set(by_weight[: config.max_locales - 1])
        kept = [e for i, e in enumerate(kept) if i in survivors or (e[0], e[1]) == default_key]

    return LocaleMix([WeightedLocale(country=c, language=l, weight=w) for c, l, w in kept])
