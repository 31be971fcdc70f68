import os

import pytest
import torch

# keep every test run offline and reproducible
os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "an", "old", "new", "bright", "happy",
    "cell", "plane", "gay", "prison", "biology", "phone",
    "sky", "pilot", "was", "is", "in", "of", "and",
    "pharaoh", "word", "##s", "##ing", ".", ",",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A 4-layer BERT with random weights, saved locally for offline use."""
    from transformers import BertConfig, BertModel, BertTokenizerFast

    model_dir = tmp_path_factory.mktemp("tinybert")
    vocab_file = model_dir / "vocab.txt"
    vocab_file.write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    tokenizer = BertTokenizerFast(str(vocab_file), do_lower_case=False)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=4,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=96,
    )
    torch.manual_seed(1234)
    model = BertModel(config)
    model.save_pretrained(model_dir)
    tokenizer.save_pretrained(model_dir)
    return model_dir


TARGETS = ("cell", "plane", "gay")

# 50 sentences built only from the tiny vocabulary; occurrence counts of the
# targets are fixed by construction and re-counted in the tests
TOY_SENTENCES = (
    ["the", "cell", "was", "old"],
    ["a", "plane", "is", "in", "the", "sky"],
    ["the", "gay", "pilot", "was", "happy"],
    ["the", "cell", "in", "the", "prison", "was", "old"],
    ["a", "cell", "of", "biology", "is", "new"],
    ["the", "phone", "and", "the", "cell", "phone"],
    ["a", "plane", "and", "a", "plane"],
    ["the", "pharaoh", "was", "old", "and", "happy"],
    ["the", "word", "is", "new"],
    ["an", "old", "pilot", "in", "a", "new", "plane"],
) + tuple(
    [["the", "word", "was", "bright"]] * 20
    + [["a", "new", "word", "is", "in", "the", "sky"]] * 20
)


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    corpus_dir = tmp_path_factory.mktemp("corpus")
    path = corpus_dir / "toy.txt"
    with open(path, "w", encoding="utf-8") as f:
        for tokens in TOY_SENTENCES:
            f.write(" ".join(tokens) + "\n")
    targets = corpus_dir / "targets.txt"
    targets.write_text("\n".join(TARGETS) + "\n", encoding="utf-8")
    return path, targets
