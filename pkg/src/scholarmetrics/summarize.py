"""Text summaries for analysis results via a pluggable provider.

The prompt is a structured fact block computed from the result (totals,
extrema, least-squares trend); the bundled template provider turns that
block into deterministic prose, so every number in a fallback summary is
traceable to the result. An HTTP provider adapts any hosted text-generation
endpoint; on provider failure the template output is returned instead.
"""

import logging
from dataclasses import dataclass

import httpx

from .result import AnalysisResult

logger = logging.getLogger(__name__)

EMPTY_MESSAGE = "No data available for this analysis."
MAX_FALLBACK_CHARS = 2000


@dataclass(frozen=True)
class Summary:
    text: str
    provider: str
    fallback_used: bool


def build_prompt(result: AnalysisResult, spec=None) -> str:
    """Structured fact block: analysis kind, totals, extrema, trend
    direction (sign of the least-squares slope of the first value column),
    and the leading rows."""
    lines = [
        "Summarize this analysis result for a researcher.",
        f"analysis: {result.kind}",
        f"label_column: {result.label_name}",
        f"value_columns: {', '.join(result.columns)}",
        f"row_count: {len(result.rows)}",
    ]
    values = _scalar_values(result)
    if values:
        total = sum(v for _, v in values)
        hi_label, hi = max(values, key=lambda kv: (kv[1], kv[0]))
        lo_label, lo = min(values, key=lambda kv: (kv[1], kv[0]))
        lines.append(f"total: {_num(total)}")
        lines.append(f"max: {hi_label} = {_num(hi)}")
        lines.append(f"min: {lo_label} = {_num(lo)}")
        lines.append(f"trend: {_trend(values)}")
        lines.append("top_rows:")
        for label, v in values[:5]:
            lines.append(f"  {label} = {_num(v)}")
    if spec is not None:
        lines.append(f"chart_type: {spec.options.chart_type}")
    if result.meta.get("mode"):
        lines.append(f"mode: {result.meta['mode']}")
    return "\n".join(lines)


def _scalar_values(result: AnalysisResult):
    out = []
    for row in result.rows:
        v = row[1] if len(row) > 1 else None
        if isinstance(v, list):
            v = float(sum(v)) if v else 0.0
        if isinstance(v, (int, float)):
            out.append((str(row[0]), v))
    return out


def _num(v) -> str:
    if isinstance(v, float) and not v.is_integer():
        return f"{v:.4g}"
    return str(int(v))


def _trend(values) -> str:
    """Sign of the least-squares slope over row order."""
    n = len(values)
    if n < 2:
        return "flat"
    xs = range(n)
    ys = [v for _, v in values]
    x_mean = (n - 1) / 2
    y_mean = sum(ys) / n
    num = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    den = sum((x - x_mean) ** 2 for x in xs)
    slope = num / den
    if slope > 1e-12:
        return "increasing"
    if slope < -1e-12:
        return "decreasing"
    return "stable"


class TemplateSummaryProvider:
    """Deterministic fallback: renders the fact block into prose. Output is
    a pure function of the prompt and never exceeds 2000 characters."""

    identifier = "template-fallback"
    timeout = 0.0

    def summarize(self, prompt: str) -> str:
        facts = {}
        top = []
        in_top = False
        for line in prompt.splitlines():
            if line.startswith("  ") and in_top:
                top.append(line.strip())
                continue
            in_top = False
            if line == "top_rows:":
                in_top = True
            elif ":" in line:
                key, _, value = line.partition(":")
                facts[key.strip()] = value.strip()

        kind = facts.get("analysis", "analysis").replace("_", " ")
        rows = int(facts.get("row_count", "0") or 0)
        if rows == 0:
            return EMPTY_MESSAGE

        sentences = [f"This {kind} covers {rows} row(s)."]
        if "total" in facts:
            sentences.append(f"The values sum to {facts['total']}.")
        if "max" in facts:
            label, _, value = facts["max"].partition(" = ")
            sentences.append(f"The highest value is {value} for {label!r}.")
        if "min" in facts and facts.get("min") != facts.get("max"):
            label, _, value = facts["min"].partition(" = ")
            sentences.append(f"The lowest value is {value} for {label!r}.")
        trend = facts.get("trend")
        if trend in ("increasing", "decreasing"):
            sentences.append(f"Across the rows the series shows an {trend} trend."
                             if trend == "increasing" else
                             f"Across the rows the series shows a {trend} trend.")
        elif trend == "stable":
            sentences.append("The series is essentially stable across the rows.")
        if top:
            sentences.append("Leading entries: " + "; ".join(top) + ".")
        text = " ".join(sentences)
        return text[:MAX_FALLBACK_CHARS]


class HttpSummaryProvider:
    """POST {"prompt": ...} JSON, expect {"text": ...}."""

    def __init__(self, url: str, timeout: float = 30.0, token: str | None = None):
        self.url = url
        self.timeout = timeout
        self.token = token
        self.identifier = f"http:{url}"

    def summarize(self, prompt: str) -> str:
        headers = {"Authorization": f"Bearer {self.token}"} if self.token else {}
        resp = httpx.post(self.url, json={"prompt": prompt}, headers=headers,
                          timeout=self.timeout)
        resp.raise_for_status()
        text = resp.json()["text"]
        if not isinstance(text, str) or not text:
            raise ValueError("summary provider returned no text")
        return text


def generate_summary(result: AnalysisResult, spec=None, provider=None) -> Summary:
    """Summary plus provenance. Provider errors fall back to the template
    provider, so a summary is always produced."""
    fallback = TemplateSummaryProvider()
    if not result.rows:
        return Summary(EMPTY_MESSAGE, fallback.identifier, False)
    prompt = build_prompt(result, spec)
    if provider is None:
        provider = fallback
    try:
        return Summary(provider.summarize(prompt), provider.identifier, False)
    except Exception as exc:
        logger.warning("summary provider %s failed (%s); using fallback",
                       getattr(provider, "identifier", "custom"), exc)
        return Summary(fallback.summarize(prompt), fallback.identifier, True)


def summarize_result(result: AnalysisResult, spec=None, provider=None) -> str:
    return generate_summary(result, spec, provider).text
