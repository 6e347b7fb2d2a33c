import pytest

from scholarmetrics import bibtrail, scitrace
from scholarmetrics.result import AnalysisResult
from scholarmetrics.summarize import (
    EMPTY_MESSAGE,
    TemplateSummaryProvider,
    build_prompt,
    generate_summary,
    summarize_result,
)


def _rising_series():
    rows = [(str(2000 + i), i + 1) for i in range(6)]
    return AnalysisResult("publications_series", ["total"], rows, "year", {"mode": "total"})


def test_rising_series_mentions_increasing_trend():
    text = summarize_result(_rising_series())
    assert "increasing trend" in text


def test_falling_series_mentions_decreasing_trend():
    rows = [(str(2000 + i), 10 - i) for i in range(6)]
    result = AnalysisResult("citations_series", ["total"], rows, "year", {})
    assert "decreasing trend" in summarize_result(result)


def test_empty_result_message():
    result = AnalysisResult("publications_series", ["total"], [], "year", {})
    assert summarize_result(result) == EMPTY_MESSAGE


def test_t5_top_authors_names_top_author(t5):
    result = scitrace.author_analysis(t5, "top_authors", n=3)
    text = summarize_result(result)
    assert "Chen L." in text


def test_fallback_is_deterministic(t5):
    result = bibtrail.publications_series(t5, "total")
    assert summarize_result(result) == summarize_result(result)


def test_fallback_length_bound(syn50):
    result = scitrace.top_entities(syn50, "institutes", n=10)
    assert len(summarize_result(result)) <= 2000


def test_numbers_come_from_result(t5):
    result = bibtrail.citations_series(t5, "total")
    text = summarize_result(result)
    assert "20" in text          # total citations
    assert "2019" in text        # max year label


class ExplodingProvider:
    identifier = "exploding"

    def summarize(self, prompt):
        raise RuntimeError("boom")


class EchoProvider:
    identifier = "echo"

    def summarize(self, prompt):
        return "ECHO:" + prompt[:40]


def test_provider_used_when_healthy(t5):
    result = bibtrail.publications_series(t5, "total")
    outcome = generate_summary(result, provider=EchoProvider())
    assert outcome.provider == "echo"
    assert outcome.text.startswith("ECHO:")
    assert not outcome.fallback_used


def test_provider_failure_falls_back(t5):
    result = bibtrail.publications_series(t5, "total")
    outcome = generate_summary(result, provider=ExplodingProvider())
    assert outcome.fallback_used
    assert outcome.provider == "template-fallback"
    assert outcome.text                        # never empty


def test_prompt_contains_structured_facts(t5):
    result = bibtrail.publications_series(t5, "total")
    prompt = build_prompt(result)
    assert "analysis: publications_series" in prompt
    assert "row_count: 4" in prompt
    assert "trend:" in prompt
    assert "max: 2020 = 2" in prompt


def test_template_nonempty_for_nonempty_prompt():
    provider = TemplateSummaryProvider()
    out = provider.summarize("analysis: x\nrow_count: 1")
    assert out
