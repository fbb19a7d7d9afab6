import random
import string

import pytest
from hypothesis import given, strategies as st

from eventpol.textprep import (
    default_lemma_dict,
    default_stoplist,
    lemmatize,
    load_lemma_dict,
    load_stoplist,
    normalize,
    prep_for_features,
    remove_stopwords,
    tokenize,
)


class TestNormalize:
    def test_url_removed(self):
        assert normalize("Check https://x.co NOW") == "check now"

    def test_www_url_removed(self):
        assert normalize("see www.example.com please") == "see please"

    def test_mention_and_hashtag(self):
        assert normalize("#covid19 @user hello") == "covid19 hello"

    def test_whitespace_collapsed(self):
        assert normalize("a \t b\n\nc") == "a b c"

    def test_empty(self):
        assert normalize("") == ""

    def test_idempotent_random(self):
        pool = string.ascii_letters + string.digits + " #@./:!?\t\n" + "https www"
        rnd = random.Random(7)
        for _ in range(1000):
            s = "".join(rnd.choice(pool) for _ in range(rnd.randrange(0, 60)))
            once = normalize(s)
            assert normalize(once) == once

    @given(st.text(max_size=80))
    def test_idempotent_hypothesis(self, s):
        once = normalize(s)
        assert normalize(once) == once


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_boundary_rule(self):
        assert tokenize("don't stop") == ["don", "t", "stop"]

    def test_order_preserved(self):
        assert tokenize("b2b a1") == ["b2b", "a1"]

    @given(st.text(max_size=40), st.text(max_size=40))
    def test_concatenation(self, a, b):
        assert tokenize(a + " " + b) == tokenize(a) + tokenize(b)

    @given(st.text(max_size=80))
    def test_tokens_lowercase_nonempty(self, s):
        for token in tokenize(s):
            assert token
            assert token == token.lower()
            assert " " not in token


class TestStopwords:
    def test_empty_stoplist_is_identity(self):
        tokens = ["the", "virus", "is", "bad"]
        assert remove_stopwords(tokens, frozenset()) == tokens

    def test_exact_matches_removed_in_order(self):
        assert remove_stopwords(["the", "virus", "is", "bad"], {"the", "is"}) == ["virus", "bad"]

    @given(st.lists(st.sampled_from(["a", "b", "c", "d", "e"]), max_size=30),
           st.frozensets(st.sampled_from(["a", "b", "c"])))
    def test_result_disjoint_from_stoplist(self, tokens, stoplist):
        assert not set(remove_stopwords(tokens, stoplist)) & stoplist


class TestLemmatize:
    def test_empty_dict_is_identity(self):
        assert lemmatize(["viruses"], {}) == ["viruses"]

    def test_lookup(self):
        assert lemmatize(["viruses"], {"viruses": "virus"}) == ["virus"]

    @given(st.lists(st.sampled_from(["runs", "run", "cats", "cat", "go"]), max_size=20))
    def test_idempotent_when_values_are_fixed_points(self, tokens):
        lemmas = {"runs": "run", "cats": "cat", "went": "go"}
        once = lemmatize(tokens, lemmas)
        assert lemmatize(once, lemmas) == once


class TestPrepForFeatures:
    def test_empty(self):
        assert prep_for_features("", {"the"}, {}) == []

    def test_composition_example(self):
        got = prep_for_features("The VIRUSES spread! http://a.b", {"the"}, {"viruses": "virus"})
        assert got == ["virus", "spread"]

    def test_equals_manual_composition(self):
        rnd = random.Random(11)
        pool = "the viruses spread HTTP://x.io #tag @who is was bad good 123 ! ?".split()
        stoplist = frozenset({"the", "is", "was"})
        lemmas = {"viruses": "virus", "spread": "spread"}
        for _ in range(500):
            text = " ".join(rnd.choice(pool) for _ in range(rnd.randrange(0, 12)))
            manual = lemmatize(remove_stopwords(tokenize(normalize(text)), stoplist), lemmas)
            assert prep_for_features(text, stoplist, lemmas) == manual

    def test_output_clean(self):
        stoplist = default_stoplist()
        lemmas = default_lemma_dict()
        out = prep_for_features("The clinics WERE closed https://t.co/x #Lockdowns", stoplist, lemmas)
        for token in out:
            assert token == token.lower()
            assert token
            assert token not in stoplist


class TestFileLoaders:
    def test_stoplist_comments_and_blank_lines(self, tmp_path):
        p = tmp_path / "stop.txt"
        p.write_text("# comment\nthe\n\nis  # trailing\nAND\n", encoding="utf-8")
        assert load_stoplist(p) == frozenset({"the", "is", "and"})

    def test_lemma_file(self, tmp_path):
        p = tmp_path / "lem.tsv"
        p.write_text("# c\nviruses\tvirus\nWent\tGo\n\nbroken_line_no_tab\n", encoding="utf-8")
        assert load_lemma_dict(p) == {"viruses": "virus", "went": "go"}

    def test_packaged_defaults_load(self):
        stoplist = default_stoplist()
        lemmas = default_lemma_dict()
        assert "the" in stoplist
        assert lemmas["viruses"] == "virus"
        assert all(v not in stoplist for v in lemmas.values())
