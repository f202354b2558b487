"""Benchmark replay over buggy/fixed snippet pairs.

A dataset is a JSON-lines file, one record per pair: an id, the concerned
resource type, both snippet sources inline, and optional ground-truth
intention lines written in the canonical pattern format.  Two metric
families are computed: intention-inference precision/recall plus resource
coverage, and detection rate / false alarm rate over pair verdicts.

Reference results of the original study (hosted gpt-4 over the DroidLeaks
corpus) are recorded in :data:`REFERENCE_RESULTS` for orientation only;
they depend on a remote model and are not reproducible offline, so nothing
here asserts them.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .detector import analyze_method
from .errors import DatasetFormatError, LeakScopeError
from .intentions import IntentionSet, normalize_var, parse_answer
from .javasrc import MethodSnippet, parse_method
from .providers import ProviderConfig, infer, make_provider

log = logging.getLogger(__name__)

# Reported by the original study; offline runs cannot reproduce them.  The
# source corpus names 28 concerned resource types overall while its coverage
# table counts 19 covered (67.9%); this harness always uses the dataset's own
# distinct-type count as the coverage denominator.
REFERENCE_RESULTS = {
    "intention_precision": 0.746,
    "intention_recall": 0.818,
    "bug_detection_rate": 0.535,  # 46 of 86 pairs
    "false_alarm_rate": 0.081,  # 7 of 86 pairs
    "resource_coverage": 0.679,  # 19 of 28 types
}


@dataclass
class SnippetRecord:
    source: str
    first_line: int = 1
    ground_truth: IntentionSet | None = None

    def parse(self) -> MethodSnippet:
        return parse_method(self.source, self.first_line)


@dataclass
class EvalPair:
    id: str
    concerned_resource_type: str
    buggy: SnippetRecord
    fixed: SnippetRecord
    expected_var: str | None = None

    def __post_init__(self):
        if not self.concerned_resource_type:
            raise DatasetFormatError(f"pair {self.id}: empty concerned resource type")


@dataclass
class PairVerdict:
    pair_id: str
    detected: bool
    false_alarm: bool
    buggy_error: str | None = None
    fixed_error: str | None = None


@dataclass
class IntentionMetrics:
    precision: float
    recall: float
    covered_types: int
    total_types: int

    @property
    def coverage_ratio(self) -> float:
        return self.covered_types / self.total_types if self.total_types else 0.0


@dataclass
class DetectionMetrics:
    detection_rate: float
    false_alarm_rate: float
    verdicts: list[PairVerdict] = field(default_factory=list)


@dataclass
class MetricsReport:
    precision: float
    recall: float
    covered_types: int
    total_types: int
    coverage_ratio: float
    detection_rate: float
    false_alarm_rate: float
    verdicts: list[PairVerdict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "covered_types": self.covered_types,
            "total_types": self.total_types,
            "coverage_ratio": self.coverage_ratio,
            "detection_rate": self.detection_rate,
            "false_alarm_rate": self.false_alarm_rate,
            "pairs": [
                {
                    "id": v.pair_id,
                    "detected": v.detected,
                    "false_alarm": v.false_alarm,
                    "buggy_error": v.buggy_error,
                    "fixed_error": v.fixed_error,
                }
                for v in self.verdicts
            ],
        }

    def render_table(self) -> str:
        width = max([len("pair")] + [len(v.pair_id) for v in self.verdicts])
        lines = [f"{'pair':<{width}}  detected  false-alarm  notes"]
        for v in self.verdicts:
            notes = "; ".join(
                s for s in (
                    f"buggy: {v.buggy_error}" if v.buggy_error else "",
                    f"fixed: {v.fixed_error}" if v.fixed_error else "",
                ) if s
            )
            lines.append(
                f"{v.pair_id:<{width}}  {str(v.detected):<8}  {str(v.false_alarm):<11}  {notes}"
            )
        lines.append("")
        lines.append(f"intention precision   {self.precision:.3f}")
        lines.append(f"intention recall      {self.recall:.3f}")
        lines.append(
            f"resource coverage     {self.covered_types}/{self.total_types}"
            f" ({self.coverage_ratio:.1%})"
        )
        lines.append(f"bug detection rate    {self.detection_rate:.1%}")
        lines.append(f"false alarm rate      {self.false_alarm_rate:.1%}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Dataset IO


def _snippet_from_record(obj: dict, pair_id: str, which: str) -> SnippetRecord:
    try:
        raw = obj[which]
        source = raw["source"]
    except KeyError as exc:
        raise DatasetFormatError(f"pair {pair_id}: missing {which} snippet") from exc
    ground = raw.get("ground_truth")
    ground_set = parse_answer("\n".join(ground)) if ground is not None else None
    return SnippetRecord(source, raw.get("first_line", 1), ground_set)


def load_dataset(path: str | Path) -> list[EvalPair]:
    pairs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
        pair_id = str(obj.get("id", f"pair-{lineno}"))
        pairs.append(
            EvalPair(
                id=pair_id,
                concerned_resource_type=obj.get("concerned_resource_type", ""),
                buggy=_snippet_from_record(obj, pair_id, "buggy"),
                fixed=_snippet_from_record(obj, pair_id, "fixed"),
                expected_var=obj.get("expected_var"),
            )
        )
    return pairs


# ---------------------------------------------------------------------------
# Resource-type correspondence

_TYPE_DECL_TEMPLATE = r"(?:final\s+)?((?:[\w$]+\.)*[A-Z][\w$]*(?:\s*<[^<>;{{}}]*>)?(?:\s*\[\s*\])*)\s+{var}\s*[=;,)]"


def _simple_type_name(type_text: str) -> str:
    text = re.sub(r"<[^<>]*>", "", type_text)
    text = text.replace("[", "").replace("]", "").strip()
    return text.split(".")[-1].strip()


def var_matches_type(
    var: str,
    concerned_type: str,
    source: str,
    expected_var: str | None = None,
) -> bool:
    """Judge whether a reported variable corresponds to the concerned type.

    An explicit expected variable wins.  Otherwise the variable's declared
    type is compared to the concerned type by simple name (either may be a
    suffix of the other, so ``AndroidHttpClient`` matches ``HttpClient``),
    with the initializer text as a name-based fallback.
    """
    if expected_var is not None:
        return normalize_var(var) == normalize_var(expected_var)
    concerned = _simple_type_name(concerned_type)
    decl = re.search(_TYPE_DECL_TEMPLATE.format(var=re.escape(var)), source)
    if decl:
        declared = _simple_type_name(decl.group(1))
        if declared == concerned or declared.endswith(concerned) or concerned.endswith(declared):
            return True
    init = re.search(rf"\b{re.escape(var)}\s*=\s*([^;]*)", source)
    if init and re.search(rf"\b{re.escape(concerned)}\b", init.group(1)):
        return True
    return False


# ---------------------------------------------------------------------------
# Metrics


def _infer_for(record: SnippetRecord, config: ProviderConfig, provider) -> IntentionSet:
    return infer(record.parse(), config, provider)


def eval_intentions(
    pairs: list[EvalPair], config: ProviderConfig
) -> IntentionMetrics:
    """Precision/recall of inferred intentions against per-snippet ground
    truth, plus coverage of the dataset's concerned resource types."""
    provider = make_provider(config)
    true_positives = 0
    inferred_total = 0
    ground_total = 0
    covered: set[str] = set()
    types = {p.concerned_resource_type for p in pairs}
    for pair in pairs:
        for record in (pair.buggy, pair.fixed):
            if record.ground_truth is None:
                raise DatasetFormatError(
                    f"pair {pair.id}: intention evaluation needs ground-truth intentions"
                )
            inferred = _infer_for(record, config, provider)
            inferred_total += len(inferred)
            ground_total += len(record.ground_truth)
            true_positives += sum(1 for i in inferred if i in record.ground_truth)
            for intent in inferred:
                if var_matches_type(
                    intent.var, pair.concerned_resource_type, record.source, pair.expected_var
                ):
                    covered.add(pair.concerned_resource_type)
    if inferred_total == 0:
        precision = 0.0
        if ground_total:
            log.warning("no intentions inferred at all; precision defined as 0")
    else:
        precision = true_positives / inferred_total
    recall = true_positives / ground_total if ground_total else 1.0
    return IntentionMetrics(precision, recall, len(covered), len(types))


def _reports_match_type(reports, pair: EvalPair, source: str) -> bool:
    return any(
        var_matches_type(r.resource, pair.concerned_resource_type, source, pair.expected_var)
        for r in reports
    )


def eval_detection(
    pairs: list[EvalPair], config: ProviderConfig, max_paths: int = 4096
) -> DetectionMetrics:
    """Detection rate over buggy versions and false alarm rate over fixed
    versions.  Per-pair analysis errors count as not-detected / no-alarm and
    are recorded in the verdict table."""
    provider = make_provider(config)
    verdicts: list[PairVerdict] = []
    for pair in pairs:
        detected = false_alarm = False
        buggy_error = fixed_error = None
        try:
            snippet = pair.buggy.parse()
            reports = analyze_method(snippet, infer(snippet, config, provider), max_paths)
            detected = _reports_match_type(reports, pair, pair.buggy.source)
        except LeakScopeError as exc:
            buggy_error = str(exc)
            log.warning("pair %s buggy version failed: %s", pair.id, exc)
        try:
            snippet = pair.fixed.parse()
            reports = analyze_method(snippet, infer(snippet, config, provider), max_paths)
            false_alarm = _reports_match_type(reports, pair, pair.fixed.source)
        except LeakScopeError as exc:
            fixed_error = str(exc)
            log.warning("pair %s fixed version failed: %s", pair.id, exc)
        verdicts.append(PairVerdict(pair.id, detected, false_alarm, buggy_error, fixed_error))
    total = len(pairs)
    detection_rate = sum(v.detected for v in verdicts) / total if total else 0.0
    false_alarm_rate = sum(v.false_alarm for v in verdicts) / total if total else 0.0
    return DetectionMetrics(detection_rate, false_alarm_rate, verdicts)


def evaluate(
    pairs: list[EvalPair], config: ProviderConfig, max_paths: int = 4096
) -> MetricsReport:
    """Run both metric families and combine them into one report."""
    intention = eval_intentions(pairs, config)
    detection = eval_detection(pairs, config, max_paths)
    return MetricsReport(
        precision=intention.precision,
        recall=intention.recall,
        covered_types=intention.covered_types,
        total_types=intention.total_types,
        coverage_ratio=intention.coverage_ratio,
        detection_rate=detection.detection_rate,
        false_alarm_rate=detection.false_alarm_rate,
        verdicts=detection.verdicts,
    )
