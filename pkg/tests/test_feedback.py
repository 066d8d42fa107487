import random

import pytest

from focuscrawl.feedback import FeedbackInput, discriminating_power, extract_candidates, suggest
from focuscrawl.ranking import RankParams
from focuscrawl.text import NoiseWordSet

from oracles import naive_dp, naive_rank

NO_NOISE = NoiseWordSet()
DEFAULTS = RankParams()


def planted_corpus():
    """Hot docs carry 'regatta' adjacent to the query terms; cold docs never
    mention it."""
    query = frozenset({"sailing", "course"})
    good = [
        "the sailing regatta course begins at dawn".split(),
        "join our sailing course regatta with maps".split(),
        "regatta sailing course notes for beginners".split(),
    ]
    bad = [
        "sailing course pricing flyer deadline april".split(),
        "sailing course cancelled due to weather".split(),
    ]
    return FeedbackInput(good=good, bad=bad, query=query, pool_size=20, output_size=5)


class TestExtractCandidates:
    def test_nearest_words_come_first(self):
        fb = FeedbackInput(
            good=["java tutorial monitor repair".split()],
            query=frozenset({"monitor"}),
            pool_size=10,
            output_size=1,
            window=2,
        )
        words = [c.word for c in extract_candidates(fb, NO_NOISE, DEFAULTS)]
        assert set(words) == {"tutorial", "repair", "java"}
        assert words.index("tutorial") < words.index("java")
        assert words.index("repair") < words.index("java")

    def test_noise_words_excluded(self):
        fb = FeedbackInput(
            good=["the sailing the course the".split()],
            query=frozenset({"sailing"}),
            window=3,
        )
        noise = NoiseWordSet(["the", "course"])
        # 'course' is noise here, 'the' too: nothing non-noise nearby.
        assert extract_candidates(fb, noise, DEFAULTS) == []

    def test_query_words_excluded(self):
        fb = FeedbackInput(
            good=["sailing course sailing course".split()],
            query=frozenset({"sailing", "course"}),
            window=5,
        )
        assert extract_candidates(fb, NO_NOISE, DEFAULTS) == []

    def test_out_of_window_occurrences_ignored(self):
        doc = "sailing w1 w2 w3 far1 far2 far3".split()
        fb = FeedbackInput(good=[doc], query=frozenset({"sailing"}), window=3)
        words = {c.word for c in extract_candidates(fb, NO_NOISE, DEFAULTS)}
        assert words == {"w1", "w2", "w3"}

    def test_pool_size_truncates(self):
        doc = ("sailing " + " ".join(f"w{i}" for i in range(30))).split()
        fb = FeedbackInput(good=[doc], query=frozenset({"sailing"}), window=30, pool_size=7, output_size=3)
        assert len(extract_candidates(fb, NO_NOISE, DEFAULTS)) == 7

    def test_no_good_docs_rejected(self):
        with pytest.raises(ValueError):
            FeedbackInput(good=[], query=frozenset({"a"}))


class TestDiscriminatingPower:
    def test_identical_sets_cancel(self):
        docs = ["sailing regatta course".split(), "other words here".split()]
        fb = FeedbackInput(good=docs, bad=list(docs), query=frozenset({"sailing"}))
        for term in ("regatta", "words", "zzz"):
            assert discriminating_power(term, fb, DEFAULTS) == pytest.approx(0.0)

    def test_empty_bad_side_is_good_mean(self):
        fb = planted_corpus()
        fb_no_bad = FeedbackInput(
            good=fb.good, bad=[], query=fb.query, pool_size=20, output_size=5
        )
        dp = discriminating_power("regatta", fb_no_bad, DEFAULTS)
        expected = sum(
            naive_rank(g, set(fb.query) | {"regatta"}) for g in fb.good
        ) / len(fb.good)
        assert dp == pytest.approx(expected)

    def test_matches_direct_recomputation(self):
        fb = planted_corpus()
        for term in ("regatta", "maps", "weather", "absent"):
            expected = naive_dp(term, fb.good, fb.bad, fb.query, naive_rank)
            assert discriminating_power(term, fb, DEFAULTS) == pytest.approx(expected)

    def test_planted_term_beats_absent_terms(self):
        fb = planted_corpus()
        planted = discriminating_power("regatta", fb, DEFAULTS)
        for absent in ("zebra", "qqqq"):
            assert planted > discriminating_power(absent, fb, DEFAULTS)

    def test_shared_doc_shift_matches_recomputation(self):
        fb = planted_corpus()
        extra = "sailing course regatta flyer".split()
        shifted = FeedbackInput(
            good=fb.good + [extra],
            bad=fb.bad + [extra],
            query=fb.query,
            pool_size=20,
            output_size=5,
        )
        for term in ("regatta", "maps"):
            expected = naive_dp(term, shifted.good, shifted.bad, fb.query, naive_rank)
            assert discriminating_power(term, shifted, DEFAULTS) == pytest.approx(expected)


class TestSuggest:
    def test_recovers_planted_word(self):
        fb = planted_corpus()
        fb.output_size = 1
        out = suggest(fb, NO_NOISE, DEFAULTS)
        assert [s.word for s in out] == ["regatta"]

    def test_ordering_invariant_under_amplitude_scaling(self):
        fb = planted_corpus()
        base = [s.word for s in suggest(fb, NO_NOISE, DEFAULTS)]
        scaled_params = RankParams(amplitude=DEFAULTS.amplitude * 7)
        scaled = [s.word for s in suggest(fb, NO_NOISE, scaled_params)]
        assert base == scaled

    def test_output_subset_of_candidates(self):
        fb = planted_corpus()
        candidates = {c.word for c in extract_candidates(fb, NO_NOISE, DEFAULTS)}
        out = suggest(fb, NO_NOISE, DEFAULTS)
        assert {s.word for s in out} <= candidates
        assert len(out) <= fb.output_size

    def test_all_candidates_returned_when_output_size_allows(self):
        doc = "sailing alpha beta".split()
        fb = FeedbackInput(good=[doc], query=frozenset({"sailing"}), window=5,
                           pool_size=10, output_size=10)
        out = suggest(fb, NO_NOISE, DEFAULTS)
        assert sorted(s.word for s in out) == ["alpha", "beta"]
        assert all(s.dp > 0 for s in out)

    def test_empty_candidates_give_empty_output(self):
        fb = FeedbackInput(good=["nothing relevant here".split()],
                           query=frozenset({"sailing"}))
        assert suggest(fb, NO_NOISE, DEFAULTS) == []

    def test_deterministic(self):
        rng = random.Random(3)
        vocab = ["w%d" % i for i in range(12)] + ["sailing"]
        docs = [[rng.choice(vocab) for _ in range(20)] for _ in range(4)]
        fb = FeedbackInput(good=docs[:2], bad=docs[2:], query=frozenset({"sailing"}),
                           pool_size=10, output_size=5)
        runs = [tuple((s.word, round(s.dp, 9)) for s in suggest(fb, NO_NOISE, DEFAULTS))
                for _ in range(3)]
        assert len(set(runs)) == 1
