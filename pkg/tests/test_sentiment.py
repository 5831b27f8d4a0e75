"""Tests for prompt rendering, answer parsing, extractors and aggregation."""

import itertools
import json
import math
from dataclasses import replace
from types import SimpleNamespace

import httpx
import pytest

from movie_success.config import ExtractorConfig
from movie_success.errors import ContractViolation, CorruptState, ExtractorUnavailable, MalformedResponse
from movie_success.models import AggregationConfig, SentimentVector
from movie_success.sentiment import (
    BaseSentimentExtractor,
    RateLimiter,
    RemoteSentimentExtractor,
    StoredSentiment,
    StubSentimentExtractor,
    aggregate_temporal,
    build_prompt,
    extract,
    extract_batch,
    helpfulness_weight,
    lexicon_score,
    make_extractor,
    parse_extractor_response,
    read_sentiments,
    sentiment_features,
    write_sentiments,
)
from movie_success.sentiment.prompt import ANALYSIS_REQUEST

from conftest import make_review

VALID_ANSWER = {
    "sentiment_score": 7.2,
    "emotion_keywords": ["tense", "thrilling", "fresh", "bold", "tight"],
    "primary_emotion": "admiration",
    "review_focus": "plot",
    "bias_analysis": "fan bias",
    "summary": "strong thriller",
}


def vector(score, keywords=("a", "b", "c", "d", "e")):
    return SentimentVector(sentiment_score=score, emotion_keywords=tuple(keywords))


class ScriptedExtractor(BaseSentimentExtractor):
    """Replays a fixed list of answers; exceptions in the list are raised."""

    def __init__(self, answers, **kwargs):
        super().__init__(**kwargs)
        self.answers = list(answers)
        self.calls = 0

    def complete(self, prompt, review, movie):
        answer = self.answers[min(self.calls, len(self.answers) - 1)]
        self.calls += 1
        if isinstance(answer, Exception):
            raise answer
        return answer


class TestPrompt:

    def test_requests_all_six_keys(self, movie):
        prompt = build_prompt(movie, make_review(body="Great fun."))
        for key in VALID_ANSWER:
            assert key in prompt
        assert prompt.rstrip().endswith("Return ONLY the JSON result with no additional text or explanation.")

    def test_sections_in_order(self, movie):
        prompt = build_prompt(movie, make_review(body="Great fun."))
        positions = [
            prompt.index("professional film critic"),
            prompt.index("MOVIE INFORMATION:"),
            prompt.index("REVIEW TEXT:"),
            prompt.index(ANALYSIS_REQUEST.splitlines()[0]),
        ]
        assert positions == sorted(positions)

    def test_missing_budget_rendered_as_na(self, movie):
        prompt = build_prompt(replace(movie, budget=None), make_review())
        assert "Budget: N/A" in prompt
        assert "ROI: N/A" in prompt

    def test_known_budget_is_formatted(self, movie):
        prompt = build_prompt(movie, make_review())
        assert "Budget: $10,000,000" in prompt
        assert "ROI: 0.60" in prompt

    def test_empty_body_gives_empty_quotes(self, movie):
        assert 'REVIEW TEXT: ""' in build_prompt(movie, make_review(body=""))


class TestParser:

    def test_valid_answer(self):
        parsed = parse_extractor_response(json.dumps(VALID_ANSWER))
        assert parsed.sentiment_score == 7.2
        assert parsed.emotion_keywords == tuple(VALID_ANSWER["emotion_keywords"])
        assert parsed.primary_emotion == "admiration"
        assert parsed.flags == ()

    def test_out_of_range_score_is_clamped_and_flagged(self):
        parsed = parse_extractor_response(json.dumps({**VALID_ANSWER, "sentiment_score": 15}))
        assert parsed.sentiment_score == 10.0
        assert "score_clamped" in parsed.flags

    def test_low_score_clamps_to_one(self):
        assert parse_extractor_response('{"sentiment_score": -3}').sentiment_score == 1.0

    def test_plain_text_is_malformed(self):
        with pytest.raises(MalformedResponse):
            parse_extractor_response("I think it's positive")

    @pytest.mark.parametrize("raw", ["[1, 2]", '{"summary": "x"}', '{"sentiment_score": "high"}', ""])
    def test_other_malformed_answers(self, raw):
        with pytest.raises(MalformedResponse):
            parse_extractor_response(raw)

    def test_keywords_padded_and_truncated(self):
        short = parse_extractor_response('{"sentiment_score": 5, "emotion_keywords": ["calm"]}')
        assert short.emotion_keywords == ("calm", "n/a", "n/a", "n/a", "n/a")
        assert "keywords_resized" in short.flags
        long = parse_extractor_response(
            json.dumps({"sentiment_score": 5, "emotion_keywords": list("abcdefg")})
        )
        assert long.emotion_keywords == ("a", "b", "c", "d", "e")

    def test_comma_separated_keywords(self):
        parsed = parse_extractor_response('{"sentiment_score": 5, "emotion_keywords": "a, b, c, d, e"}')
        assert parsed.emotion_keywords == ("a", "b", "c", "d", "e")

    def test_code_fence_is_stripped(self):
        raw = "```json\n" + json.dumps(VALID_ANSWER) + "\n```"
        assert parse_extractor_response(raw).sentiment_score == 7.2

    def test_long_summary_is_truncated(self):
        parsed = parse_extractor_response(json.dumps({"sentiment_score": 5, "summary": "word " * 80}))
        assert len(parsed.summary.split()) == 50
        assert "summary_truncated" in parsed.flags

    def test_parsing_a_serialized_vector_is_idempotent(self):
        first = parse_extractor_response(json.dumps(VALID_ANSWER))
        assert parse_extractor_response(first.to_json()) == first


class TestStubExtractor:

    def test_negative_word_scores_below_five(self, movie):
        review = make_review(body="A disappointing evening at the cinema.")
        assert extract(review, movie, StubSentimentExtractor()).sentiment_score < 5

    def test_empty_body_backs_off_to_rating(self, movie):
        review = make_review(body="", rating=8)
        assert extract(review, movie, StubSentimentExtractor()).sentiment_score == 8.0

    def test_neutral_without_hits_or_rating(self, movie):
        assert extract(make_review(body="It exists."), movie, StubSentimentExtractor()).sentiment_score == 5.5

    def test_is_deterministic(self, movie):
        review = make_review(body="Brilliant, gripping, a little overlong.")
        stub = StubSentimentExtractor()
        assert extract(review, movie, stub) == extract(review, movie, stub)

    def test_lexicon_score_formula(self):
        score, pos, neg, hits = lexicon_score("brilliant stunning but boring")
        assert (pos, neg) == (2, 1)
        assert score == pytest.approx(5.5 + 4.5 / 3)
        assert hits == ["brilliant", "stunning", "boring"]

    def test_make_extractor_defaults_to_stub(self):
        assert isinstance(make_extractor(ExtractorConfig()), StubSentimentExtractor)


class TestExtractRetries:

    def test_retries_malformed_answer(self, movie):
        extractor = ScriptedExtractor(["not json", json.dumps(VALID_ANSWER)], max_retries=2)
        assert extract(make_review(), movie, extractor).sentiment_score == 7.2
        assert extractor.calls == 2

    def test_falls_back_after_exhausting_retries(self, movie):
        extractor = ScriptedExtractor(["nope"], max_retries=1, fallback=StubSentimentExtractor())
        result = extract(make_review(body="", rating=3), movie, extractor)
        assert result.sentiment_score == 3.0
        assert extractor.calls == 2

    def test_unavailable_without_fallback(self, movie):
        extractor = ScriptedExtractor([ExtractorUnavailable("down")], max_retries=2)
        with pytest.raises(ExtractorUnavailable):
            extract(make_review(), movie, extractor)
        assert extractor.calls == 3


class TestExtractBatch:

    def test_precomputed_vectors_skip_extraction(self, movie):
        reviews = [make_review(day=float(d), author=f"u{d}", body="brilliant") for d in range(3)]
        precomputed = {reviews[1].review_id: vector(2.0)}
        extractor = ScriptedExtractor([json.dumps(VALID_ANSWER)])
        results = extract_batch([(r, movie) for r in reviews], extractor, precomputed, progress=False)
        assert list(results) == [r.review_id for r in reviews]
        assert results[reviews[1].review_id].sentiment_score == 2.0
        assert extractor.calls == 2

    def test_worker_count_does_not_change_results(self, movie):
        reviews = [
            make_review(day=float(d), author=f"u{d}", body=("brilliant " if d % 2 else "boring ") * (d + 1))
            for d in range(12)
        ]
        items = [(r, movie) for r in reviews]
        serial = extract_batch(items, StubSentimentExtractor(), progress=False)
        threaded = extract_batch(items, StubSentimentExtractor(), max_workers=4, progress=False)
        assert list(serial) == list(threaded)
        assert serial == threaded


class TestRemoteExtractor:

    @staticmethod
    def fake_client(content=None, error=None):
        def create(**kwargs):
            if error is not None:
                raise error
            message = SimpleNamespace(content=content)
            return SimpleNamespace(choices=[SimpleNamespace(message=message)])

        return SimpleNamespace(chat=SimpleNamespace(completions=SimpleNamespace(create=create)))

    @staticmethod
    def free_limiter():
        return RateLimiter(1000.0, clock=lambda: 0.0, sleep=lambda _: None)

    def test_returns_message_content(self, movie):
        config = ExtractorConfig(mode="remote")
        extractor = RemoteSentimentExtractor(
            config, client=self.fake_client(json.dumps(VALID_ANSWER)), limiter=self.free_limiter()
        )
        assert extract(make_review(), movie, extractor).sentiment_score == 7.2

    def test_timeout_falls_back_to_stub(self, movie):
        config = ExtractorConfig(mode="remote", max_retries=1)
        extractor = RemoteSentimentExtractor(
            config, client=self.fake_client(error=httpx.TimeoutException("slow")), limiter=self.free_limiter()
        )
        assert extract(make_review(body="", rating=9), movie, extractor).sentiment_score == 9.0

    def test_timeout_without_fallback_is_unavailable(self, movie):
        config = ExtractorConfig(mode="remote", max_retries=0, fallback_to_stub=False)
        extractor = RemoteSentimentExtractor(
            config, client=self.fake_client(error=httpx.TimeoutException("slow")), limiter=self.free_limiter()
        )
        with pytest.raises(ExtractorUnavailable):
            extract(make_review(), movie, extractor)

    def test_missing_api_key(self, monkeypatch):
        monkeypatch.delenv("SENTIMENT_API_KEY", raising=False)
        with pytest.raises(ExtractorUnavailable):
            RemoteSentimentExtractor(ExtractorConfig(mode="remote"))

    def test_rate_limiter_spaces_requests(self):
        now = [0.0]
        slept = []

        def sleep(seconds):
            slept.append(seconds)
            now[0] += seconds

        limiter = RateLimiter(2.0, clock=lambda: now[0], sleep=sleep)
        assert limiter.wait() == 0.0
        assert limiter.wait() == pytest.approx(0.5)
        now[0] += 2.0
        assert limiter.wait() == 0.0
        assert slept == [pytest.approx(0.5)]


class TestAggregation:

    def test_single_review_at_t_with_unit_weight(self):
        review = make_review(day=3.0, upvotes=4, total_votes=4)
        config = AggregationConfig(lambda_decay=0.05, weight_smoothing=1e-9)
        assert aggregate_temporal([(vector(7.0), review)], 3.0, config).s_t == pytest.approx(7.0, abs=1e-8)

    def test_no_decay_is_plain_weighted_sum(self):
        pairs = [
            (vector(4.0), make_review(day=0.0, author="a")),
            (vector(8.0), make_review(day=5.0, author="b")),
        ]
        result = aggregate_temporal(pairs, 20.0, AggregationConfig(lambda_decay=0.0))
        assert result.s_t == pytest.approx(6.0, abs=1e-12)
        assert result.mean_score == 6.0
        assert result.score_std == 2.0
        assert result.positive_share == 0.5
        assert result.review_count == 2

    def test_two_term_decay_fixture(self):
        pairs = [
            (vector(8.0), make_review(day=0.0, author="a", upvotes=2, total_votes=3)),
            (vector(3.0), make_review(day=10.0, author="b", upvotes=8, total_votes=8)),
        ]
        result = aggregate_temporal(pairs, 10.0, AggregationConfig(lambda_decay=0.05))
        oracle = 0.6 * 8 * math.exp(-0.5) + 0.9 * 3 * math.exp(0.0)
        assert result.s_t == pytest.approx(oracle, abs=1e-12)
        assert round(result.s_t, 3) == 5.611

    def test_decay_is_strictly_decreasing_in_t(self):
        pair = [(vector(6.0), make_review(day=1.0))]
        values = [aggregate_temporal(pair, t).s_t for t in (1.0, 2.0, 5.0, 20.0)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_order_does_not_matter(self, rng):
        pairs = [
            (vector(float(rng.uniform(1, 10))), make_review(day=float(d), author=f"u{d}", upvotes=1, total_votes=3))
            for d in range(6)
        ]
        expected = aggregate_temporal(pairs, 8.0)
        for perm in itertools.islice(itertools.permutations(pairs), 0, 720, 97):
            assert aggregate_temporal(list(perm), 8.0) == expected

    def test_future_review_is_rejected(self):
        with pytest.raises(ContractViolation):
            aggregate_temporal([(vector(5.0), make_review(day=9.0))], 3.0)

    def test_empty_input(self):
        result = aggregate_temporal([], 7.0)
        assert result.s_t == 0.0
        assert result.mean_score is None and result.review_count == 0

    @pytest.mark.parametrize("upvotes,total", [(0, 0), (0, 50), (50, 50), (3, 7)])
    def test_weights_stay_inside_unit_interval(self, upvotes, total):
        assert 0.0 < helpfulness_weight(upvotes, total) < 1.0

    def test_bad_decay_is_rejected(self):
        with pytest.raises(ContractViolation):
            AggregationConfig(lambda_decay=-0.1)

    def test_film_features(self):
        pairs = [
            (vector(8.0), make_review(day=1.0, author="a")),
            (vector(4.0), make_review(day=3.0, author="b")),
            (vector(9.0), make_review(day=12.0, author="c")),
        ]
        feats = sentiment_features(pairs, window_days=7.0, config=AggregationConfig(lambda_decay=0.0))
        assert feats["sentiment_decayed_7d"] == pytest.approx(0.5 * 8 + 0.5 * 4)
        assert feats["sentiment_mean"] == pytest.approx(7.0)
        assert feats["sentiment_positive_share"] == pytest.approx(2 / 3)
        assert feats["log_review_count"] == pytest.approx(math.log(4))

    def test_film_without_reviews_leaves_statistics_undefined(self):
        feats = sentiment_features([])
        assert feats["sentiment_decayed_7d"] == 0.0
        assert math.isnan(feats["sentiment_mean"])
        assert feats["log_review_count"] == 0.0


class TestSentimentStore:

    def test_round_trip(self, tmp_path):
        records = [
            StoredSentiment("r1", "Night Harbour", "2014-03-15T00:00:00", vector(7.5)),
            StoredSentiment("r2", "Night Harbour", "2014-03-16T00:00:00", vector(2.0, ("x",) * 5)),
        ]
        path = write_sentiments(tmp_path / "sentiments.jsonl", records)
        loaded = read_sentiments(path)
        assert list(loaded) == ["r1", "r2"]
        assert loaded["r2"].vector == records[1].vector

    def test_bad_line_is_corrupt(self, tmp_path):
        path = tmp_path / "sentiments.jsonl"
        path.write_text('{"review_id": "r1"}\n', encoding="utf-8")
        with pytest.raises(CorruptState):
            read_sentiments(path)
