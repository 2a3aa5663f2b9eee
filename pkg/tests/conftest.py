import pytest
import torch

from relcascade.config import ModelConfig
from relcascade.engine import build_model, prepare_sentence
from relcascade.synthetic import SyntheticSpec, generate_synthetic_corpus
from relcascade.tokenization import Vocabulary


def tiny_config(**overrides) -> ModelConfig:
    base = dict(
        d=32, embedding_dim=16, relation_emb_dim=12, lstm_hidden=16,
        pos_emb_dim=8, max_rel_distance=16, dropout=0.0,
    )
    base.update(overrides)
    return ModelConfig(**base)


@pytest.fixture
def tiny_corpus():
    spec = SyntheticSpec(n_sentences=12, n_relations=4)
    sentences, schema = generate_synthetic_corpus(spec, seed=7)
    vocab = Vocabulary.build(w for s in sentences for w in s.words)
    return sentences, schema, vocab


@pytest.fixture
def tiny_model(tiny_corpus):
    sentences, schema, vocab = tiny_corpus
    torch.manual_seed(0)
    model = build_model(tiny_config(), schema, vocab)
    prepared = [prepare_sentence(s, vocab, schema) for s in sentences]
    return model, prepared, schema, vocab
