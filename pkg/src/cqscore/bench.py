"""Evaluation suites and per-method score aggregation.

Three suite kinds cover the quantity/category growth patterns: fixed
category with incremental quantity, incremental category with seeded random
quantities, and joint incremental quantity and category. Aggregation is an
unweighted arithmetic mean per column; external metric columns (clip, blip,
fid) pass through untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .boxes import InvalidInputError
from .dataset import DEFAULT_QUANTITY_WORDS, PromptSpec
from .lexicon import Lexicon, default_lexicon
from .parsing import CategoryCountMap

import random

SUITE_KINDS = (
    "fixed-category-incremental-quantity",
    "random-quantity-incremental-category",
    "incremental-quantity-incremental-category",
)
_KIND_ALIASES = {"type1": SUITE_KINDS[0], "type2": SUITE_KINDS[1], "type3": SUITE_KINDS[2]}

COMPOSITION_TAGS = ("normal", "awkward", "unlikely")

# Columns where a smaller mean ranks better.
LOWER_IS_BETTER = frozenset({"fid"})


class ConsistencyError(ValueError):
    """Inputs that must describe the same prompt set do not."""


@dataclass(frozen=True)
class SuiteSpec:
    suite_kind: str
    composition_tag: str
    prompts: list[PromptSpec]
    seed: int = 0
    quantity_distribution: str = "uniform"


@dataclass(frozen=True)
class ScoreRecord:
    record_id: str
    acc: float
    aqc: float
    cq: float
    extras: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class MethodRun:
    method_name: str
    records: list[ScoreRecord]


@dataclass(frozen=True)
class AggregateTable:
    columns: list[str]  # metric columns in display order
    rows: list[dict]  # one per method: method, n, plus column means
    best: dict[str, str]  # column -> method with the best mean


def _article(noun: str) -> str:
    return "an" if noun[:1] in "aeiou" else "a"


def _quantity_word(n: int) -> str:
    if 1 <= n <= len(DEFAULT_QUANTITY_WORDS):
        return DEFAULT_QUANTITY_WORDS[n - 1]
    return str(n)


def _render(pairs: list[tuple[int, str]], suffix: str, lex: Lexicon) -> str:
    parts = []
    for count, noun in pairs:
        if count == 1:
            parts.append(f"{_article(noun)} {noun}")
        else:
            parts.append(f"{_quantity_word(count)} {lex.pluralize(noun)}")
    if len(parts) == 1:
        body = parts[0]
    else:
        body = ", ".join(parts[:-1]) + " and " + parts[-1]
    text = f"{body} {suffix}".strip()
    return text[:1].upper() + text[1:]


def generate_suite(
    kind: str,
    categories: list[str],
    max_n: int,
    seed: int = 0,
    composition_tag: str = "normal",
    scene_suffix: str = "on the prairie",
    lex: Lexicon | None = None,
) -> SuiteSpec:
    """Build one evaluation suite; deterministic for a fixed kind/seed/config."""
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in SUITE_KINDS:
        raise InvalidInputError(f"unknown suite kind {kind!r}, options: {SUITE_KINDS}")
    if composition_tag not in COMPOSITION_TAGS:
        raise InvalidInputError(
            f"unknown composition tag {composition_tag!r}, options: {COMPOSITION_TAGS}"
        )
    if max_n < 1 or not categories:
        raise InvalidInputError("max_n must be >= 1 and categories nonempty")
    if kind != SUITE_KINDS[0] and max_n > len(categories):
        raise InvalidInputError(
            f"suite kind {kind!r} needs at least {max_n} categories, got {len(categories)}"
        )
    if lex is None:
        lex = default_lexicon()

    rng = random.Random(seed)
    prompts: list[PromptSpec] = []
    for step in range(1, max_n + 1):
        if kind == SUITE_KINDS[0]:
            pairs = [(step, categories[0])]
        elif kind == SUITE_KINDS[1]:
            pairs = [
                (rng.randint(1, len(DEFAULT_QUANTITY_WORDS)), c)
                for c in categories[:step]
            ]
        else:
            pairs = [(step, c) for c in categories[:step]]
        truth: dict[str, int] = {}
        for count, noun in pairs:
            truth[noun] = truth.get(noun, 0) + count
        prompts.append(
            PromptSpec(
                text=_render(pairs, scene_suffix, lex),
                truth=CategoryCountMap(truth),
                template_id=kind,
                seed_index=step - 1,
            )
        )
    return SuiteSpec(kind, composition_tag, prompts, seed=seed)


def write_suite(suite: SuiteSpec, path: str | Path) -> None:
    """Suite file: a JSON metadata header line, then one PromptSpec per line."""
    header = {
        "suite_kind": suite.suite_kind,
        "composition_tag": suite.composition_tag,
        "seed": suite.seed,
        "quantity_distribution": suite.quantity_distribution,
    }
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for spec in suite.prompts:
            f.write(json.dumps(spec.to_record(), sort_keys=True) + "\n")


def load_suite(path: str | Path) -> SuiteSpec:
    lines = [l for l in Path(path).read_text(encoding="utf-8").splitlines() if l.strip()]
    if not lines:
        raise InvalidInputError(f"empty suite file: {path}")
    header = json.loads(lines[0])
    prompts = [PromptSpec.from_record(json.loads(l)) for l in lines[1:]]
    return SuiteSpec(
        suite_kind=header.get("suite_kind", SUITE_KINDS[0]),
        composition_tag=header.get("composition_tag", "normal"),
        prompts=prompts,
        seed=int(header.get("seed", 0)),
        quantity_distribution=header.get("quantity_distribution", "uniform"),
    )


def aggregate(runs: list[MethodRun]) -> AggregateTable:
    """Per-method arithmetic means, sorted by mean cq descending.

    All runs must cover the same record ids; external columns are averaged
    when every record of a method carries them.
    """
    if not runs:
        raise InvalidInputError("aggregate needs at least one method run")
    reference = {r.record_id for r in runs[0].records}
    for run in runs[1:]:
        ids = {r.record_id for r in run.records}
        if ids != reference:
            missing = sorted(reference - ids)
            extra = sorted(ids - reference)
            raise ConsistencyError(
                f"method {run.method_name!r} does not cover the same prompts as "
                f"{runs[0].method_name!r}: missing {missing}, unexpected {extra}"
            )

    core = ["cq", "acc", "aqc"]
    extra_cols: list[str] = []
    for run in runs:
        for rec in run.records:
            for key in rec.extras:
                if key not in extra_cols:
                    extra_cols.append(key)

    rows = []
    for run in runs:
        n = len(run.records)
        row: dict = {"method": run.method_name, "n": n}
        row["cq"] = sum(r.cq for r in run.records) / n
        row["acc"] = sum(r.acc for r in run.records) / n
        row["aqc"] = sum(r.aqc for r in run.records) / n
        for col in extra_cols:
            values = [r.extras[col] for r in run.records if col in r.extras]
            if len(values) == n:
                row[col] = sum(values) / n
        rows.append(row)
    rows.sort(key=lambda r: (-r["cq"], r["method"]))

    columns = core + extra_cols
    best: dict[str, str] = {}
    for col in columns:
        present = [r for r in rows if col in r]
        if not present:
            continue
        if col in LOWER_IS_BETTER:
            winner = min(present, key=lambda r: (r[col], r["method"]))
        else:
            winner = min(present, key=lambda r: (-r[col], r["method"]))
        best[col] = winner["method"]
    return AggregateTable(columns=columns, rows=rows, best=best)
