"""Bag-of-words TF-IDF vectorization and cosine ranking.

Recipe descriptions form the document corpus; a user's free-text health
history is projected into the same vocabulary and ranked against every
document by cosine similarity. The idf uses the smoothed variant
ln((1 + N) / (1 + df)) + 1, which never divides by zero and floors at 1
for terms present in every document; raw term counts serve as tf since
the final L2 normalization absorbs any scale.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")
MIN_TOKEN_LEN = 2


def tokenize(text: str, stop_words: Iterable[str] = ()) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop short and stop terms."""
    stop = set(stop_words)
    return [
        t
        for t in _TOKEN_SPLIT.split(text.lower())
        if len(t) >= MIN_TOKEN_LEN and t not in stop
    ]


@dataclass(frozen=True)
class TfIdfModel:
    """Fitted vocabulary, idf weights and L2-normalized document vectors."""

    vocabulary: dict[str, int]  # term -> column index
    idf: np.ndarray  # (n_terms,)
    doc_vectors: np.ndarray  # (n_docs, n_terms), unit rows (or zero rows)
    n_docs: int
    df: np.ndarray  # (n_terms,) document frequencies
    stop_words: tuple[str, ...] = ()

    def vectorize(self, text: str) -> np.ndarray:
        """Project free text into the fitted space; unseen terms are ignored.

        Returns a unit vector, or the zero vector when no known term
        appears.
        """
        counts = np.zeros(len(self.vocabulary))
        for term in tokenize(text, self.stop_words):
            idx = self.vocabulary.get(term)
            if idx is not None:
                counts[idx] += 1.0
        vec = counts * self.idf
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec


def fit_tfidf(docs: Sequence[str], stop_words: Iterable[str] = ()) -> TfIdfModel:
    """Fit vocabulary, smooth idf and normalized doc vectors over a corpus."""
    if len(docs) == 0:
        raise EmptyCorpus("cannot fit tf-idf on an empty corpus")
    stop = tuple(stop_words)
    tokenized = [tokenize(doc, stop) for doc in docs]

    vocabulary: dict[str, int] = {}
    for term in sorted({t for tokens in tokenized for t in tokens}):
        vocabulary[term] = len(vocabulary)

    n_docs = len(docs)
    n_terms = len(vocabulary)
    df = np.zeros(n_terms)
    counts = np.zeros((n_docs, n_terms))
    for d, tokens in enumerate(tokenized):
        for term in tokens:
            counts[d, vocabulary[term]] += 1.0
        for term in set(tokens):
            df[vocabulary[term]] += 1.0

    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    vectors = counts * idf
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    vectors = np.divide(vectors, norms, out=vectors, where=norms > 0)

    return TfIdfModel(
        vocabulary=vocabulary,
        idf=idf,
        doc_vectors=vectors,
        n_docs=n_docs,
        df=df,
        stop_words=stop,
    )


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; defined as 0 when either vector is zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def similarity_to_docs(model: TfIdfModel, text: str) -> np.ndarray:
    """Cosine of the text's vector against every document vector."""
    query = model.vectorize(text)
    # rows are unit (or zero), query is unit (or zero): dot = cosine
    return model.doc_vectors @ query
