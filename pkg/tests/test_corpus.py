from __future__ import annotations

import csv

import pytest

from promptsound.corpus import load_corpus, sample_exemplars
from promptsound.errors import CorpusFormatError
from promptsound.fixtures import write_toy_corpus

HEADER = ["file_name"] + [f"caption_{i}" for i in range(1, 6)]


def write_table(path, rows, header=None):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header or HEADER)
        writer.writerows(rows)
    return path


def test_load_counts_entries(tmp_path):
    rows = [[f"clip{i}.wav"] + [f"caption {i}-{j}" for j in range(5)] for i in range(3)]
    corpus = load_corpus(write_table(tmp_path / "c.csv", rows))
    assert len(corpus) == 3
    assert corpus.caption_pool_size == 15


def test_row_with_missing_caption_is_a_format_error(tmp_path):
    rows = [["clip0.wav", "a", "b", "c", "d"]]  # only 4 captions
    with pytest.raises(CorpusFormatError):
        load_corpus(write_table(tmp_path / "c.csv", rows))


def test_empty_caption_is_a_format_error(tmp_path):
    rows = [["clip0.wav", "a", "b", "", "d", "e"]]
    with pytest.raises(CorpusFormatError, match="empty caption"):
        load_corpus(write_table(tmp_path / "c.csv", rows))


def test_wrong_header_is_a_format_error(tmp_path):
    rows = [["clip0.wav", "a", "b", "c", "d", "e"]]
    path = write_table(tmp_path / "c.csv", rows, header=["file"] + HEADER[1:])
    with pytest.raises(CorpusFormatError, match="header"):
        load_corpus(path)


def test_commas_inside_captions_survive(tmp_path):
    rows = [["clip0.wav", "a, with comma", "b", "c", "d", "e"]]
    corpus = load_corpus(write_table(tmp_path / "c.csv", rows))
    assert "a, with comma" in corpus.entries[0].captions


class TestSampling:
    @pytest.fixture
    def corpus(self, tmp_path):
        rows = [
            [f"clip{i}.wav"] + [f"caption {i}-{j}" for j in range(5)] for i in range(10)
        ]
        return load_corpus(write_table(tmp_path / "c.csv", rows))

    def test_k_zero_returns_empty(self, corpus):
        assert sample_exemplars(corpus, 0, rng_seed=1) == []

    def test_equal_seeds_give_identical_samples(self, corpus):
        assert sample_exemplars(corpus, 7, 42) == sample_exemplars(corpus, 7, 42)

    def test_different_seeds_differ(self, corpus):
        assert sample_exemplars(corpus, 7, 1) != sample_exemplars(corpus, 7, 2)

    def test_no_duplicates_within_a_sample(self, corpus):
        sample = sample_exemplars(corpus, 30, 3)
        assert len(set(sample)) == 30

    def test_sampling_whole_pool_covers_it(self, corpus):
        sample = sample_exemplars(corpus, corpus.caption_pool_size, 5)
        assert set(sample) == set(c for e in corpus.entries for c in e.captions)

    def test_k_too_large_is_a_range_error(self, corpus):
        with pytest.raises(ValueError):
            sample_exemplars(corpus, corpus.caption_pool_size + 1, 0)


def test_toy_corpus_fixture_is_loadable(tmp_path):
    corpus = load_corpus(write_toy_corpus(tmp_path / "toy.csv"))
    assert len(corpus) == 12
    assert corpus.caption_pool_size == 60
