import random

import pytest

from focuscrawl.ranking import RankParams, rank, rank_breakdown

from oracles import naive_rank

DEFAULTS = RankParams()


def random_case(rng):
    vocab = ["".join(rng.choices("abcdef", k=rng.randint(1, 7))) for _ in range(30)]
    doc = [rng.choice(vocab) for _ in range(rng.randint(0, 60))]
    keywords = set(rng.sample(vocab, rng.randint(1, 4)))
    return doc, keywords


class TestWorkedValues:
    def test_empty_document_scores_zero(self):
        b = rank_breakdown([], {"java"}, DEFAULTS)
        assert b.presence == 0 and b.frequency_mass == 0 and b.significant_terms == 0
        assert b.distance_term == 0 and b.score == 0.0

    def test_single_term_repetition(self):
        # Hand evaluation: presence 1, damped mass 1/2+1/4+1/8, no distance
        # component, so the combined mass is 10.875 and the squash gives
        # 1000 * 10.875 / 20.875.
        b = rank_breakdown(["java", "java", "java"], {"java"}, DEFAULTS)
        assert b.presence == 1.0
        assert b.frequency_mass == pytest.approx(0.875)
        assert b.significant_terms == 1
        assert b.distance_term == 0.0
        assert b.combined == pytest.approx(10.875)
        assert b.score == pytest.approx(520.9580838323353)

    def test_adjacent_pair(self):
        # Hand evaluation: both terms present once and adjacent; the pair
        # distance sum is 1 with denominator (2-0)+(2-1)=3, so the distance
        # term is 20*(250 - 1/3)/250 and the total squashes to ~752.92.
        b = rank_breakdown(["sailing", "course"], {"sailing", "course"}, DEFAULTS)
        assert b.presence == 2.0
        assert b.significant_terms == 2
        assert b.frequency_mass == pytest.approx(1.0)
        assert b.pair_distance_sum == 1
        assert b.presence_term == pytest.approx(10.0)
        assert b.frequency_term == pytest.approx(0.5)
        assert b.distance_term == pytest.approx(19.973333333333333)
        assert b.score == pytest.approx(752.9237357931148)

    def test_matches_untuned_reference_on_random_inputs(self):
        rng = random.Random(42)
        for _ in range(300):
            doc, keywords = random_case(rng)
            expected = naive_rank(doc, keywords)
            assert rank(doc, keywords, DEFAULTS) == pytest.approx(expected)


class TestProperties:
    def test_bounded_for_random_inputs(self):
        rng = random.Random(3)
        for _ in range(1000):
            doc, keywords = random_case(rng)
            score = rank(doc, keywords, DEFAULTS)
            assert 0.0 <= score < DEFAULTS.amplitude

    def test_squash_monotone_in_mass(self):
        p = DEFAULTS
        masses = [0.0, 0.1, 1.0, 5.0, 30.0, 1000.0]
        squashed = [p.amplitude * f / (f + p.half_saturation) for f in masses]
        assert squashed == sorted(squashed)
        assert all(a < b for a, b in zip(squashed, squashed[1:]))

    def test_repeat_occurrences_damped(self):
        # Appending one more exact occurrence never adds more than 2^-floor(H)
        # to the word's damped mass, H being the mass exponent before the add.
        doc = ["java"]
        for _ in range(8):
            h_before = float(len(doc))  # every occurrence contributes sim 1
            before = rank_breakdown(doc, {"java"}, DEFAULTS)
            doc = doc + ["java"]
            after = rank_breakdown(doc, {"java"}, DEFAULTS)
            gain = after.frequency_mass - before.frequency_mass
            assert 0.0 <= gain <= 2.0 ** -int(h_before) + 1e-12

    def test_insignificant_words_change_nothing(self):
        rng = random.Random(11)
        for _ in range(100):
            doc, keywords = random_case(rng)
            before = rank_breakdown(doc, keywords, DEFAULTS)
            # Appending words below the similarity bar keeps every component
            # fixed (positions of existing tokens are untouched).
            padded = doc + ["zzzz", "qqqq"]
            after = rank_breakdown(padded, keywords, DEFAULTS)
            assert after.score == pytest.approx(before.score)
            assert after.presence == pytest.approx(before.presence)
            assert after.pair_distance_sum == pytest.approx(before.pair_distance_sum)

    def test_breakdown_invariants(self):
        rng = random.Random(23)
        for _ in range(200):
            doc, keywords = random_case(rng)
            b = rank_breakdown(doc, keywords, DEFAULTS)
            assert 0 <= b.presence <= len(keywords)
            assert 0 <= b.significant_terms <= len(keywords)
            assert b.distance_term >= 0.0

    def test_empty_keywords_rejected(self):
        with pytest.raises(ValueError):
            rank(["a"], set(), DEFAULTS)

    def test_params_validated(self):
        with pytest.raises(ValueError):
            RankParams(amplitude=0)
        with pytest.raises(ValueError):
            RankParams(sim_threshold=1.0)
        with pytest.raises(ValueError):
            RankParams(max_distance=0)
