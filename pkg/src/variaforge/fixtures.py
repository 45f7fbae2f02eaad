"""Deterministic fixture corpora, lexicons, and configs for tests and demos.

Everything here is synthetic but shaped like the real thing: a
Luxembourgish-flavoured vocabulary, a saturating variant lexicon whose
identity mass yields a realistic replacement rate, task datasets at
reference split sizes, and a ready-to-run pipeline config with two toy
tasks. All generators are pure functions of their seed.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Optional, Union

from variaforge.dataset_io import (
    DESTANDARDISE_TASKS,
    SPLITS,
    TASK_KINDS,
    Dataset,
    Record,
    dataset_path,
    write_dataset,
)
from variaforge.errors import UserError
from variaforge.lexicon import (
    VariantEntry,
    VariantLexicon,
    canonical_variants,
    save_lexicon,
)

# reference split sizes (train, dev, test) for the seven tasks
REFERENCE_COUNTS: dict[str, tuple[int, int, int]] = {
    "IC": (698, 149, 159),
    "NER": (4298, 459, 770),
    "POS": (4278, 460, 388),
    "WNLI": (568, 63, 136),
    "CM": (6000, 1000, 2000),
    "SC": (1299, 185, 364),
    "TC": (701, 99, 204),
}

TOY_COUNTS: dict[str, tuple[int, int, int]] = {
    task: (96, 24, 48) for task in REFERENCE_COUNTS
}

VOCAB = (
    "haus", "kand", "mann", "fra", "grouss", "kleng", "moien", "owend",
    "haut", "muer", "gëschter", "sonn", "mound", "wieder", "reen", "schnéi",
    "wollek", "himmel", "waasser", "feier", "buedem", "loft", "wand", "bam",
    "blumm", "gaart", "bësch", "wis", "feld", "steen", "sand", "wee",
    "strooss", "bréck", "gare", "auto", "zuch", "fliger", "schëff", "land",
    "stad", "duerf", "bierg", "dall", "mier", "insel", "brout", "botter",
    "kéis", "fleesch", "fësch", "geméis", "uebst", "apel", "kiischt", "drauf",
    "mëllech", "kaffi", "zocker", "salz", "peffer", "wäin", "béier", "iessen",
    "drénken", "schlofen", "schaffen", "spillen", "liesen", "schreiwen",
    "molen", "sangen", "danzen", "lafen", "sprangen", "schwammen", "kucken",
    "lauschteren", "schwätzen", "froen", "äntweren", "denken", "wëssen",
    "léieren", "verstoen", "vergiessen", "sichen", "fannen", "kafen",
    "verkafen", "bezuelen", "hëllefen", "waarden", "bleiwen", "kommen",
    "goen", "fueren", "reesen", "wunnen", "liewen", "dréimen", "laachen",
    "kräischen", "rufen", "halen", "droen", "leeën", "setzen", "stoen",
    "sëtzen", "hänken", "maachen", "ginn", "huelen", "weisen", "zielen",
)

_DIACRITICS = str.maketrans("éëèêäâîôöûü", "eeeeaaioouu")

POS_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "DET", "PRON", "ADP", "CONJ")
NER_ENTITY_TYPES = ("PER", "ORG", "LOC", "GPE", "MISC")

SEQUENCE_LABELS = {
    "IC": ("account_balance", "card_lost", "make_transfer", "open_account",
           "loan_request", "close_account"),
    "TC": ("science", "travel", "politics", "sports", "health",
           "entertainment", "geography"),
    "SC": ("positive", "negative", "neutral"),
    "CM": ("published", "archived"),
}

DEFAULT_SEED = 2024
NOISE_RATE = 0.28  # fraction of words replaced when building noisy sources


def _mutations(word: str) -> list[str]:
    """Candidate misspellings, in a fixed rule order; letters only."""
    out = []
    stripped = word.translate(_DIACRITICS)
    if stripped != word:
        out.append(stripped)
    for k in range(1, len(word)):
        if word[k] == word[k - 1]:
            out.append(word[:k] + word[k + 1:])  # collapse a doubled letter
            break
    else:
        if len(word) >= 3:
            out.append(word + word[-1])  # double the final letter
    if len(word) >= 4:
        out.append(word[:-1])
    if len(word) >= 4:
        out.append(word[:1] + word[2] + word[1] + word[3:])
    return out


def word_variants(word: str, used: set[str]) -> tuple[str, str]:
    """Two distinct non-identity variants, globally unique across entries."""
    picked = []
    for cand in _mutations(word):
        if cand != word and cand not in used and cand not in picked:
            picked.append(cand)
            if len(picked) == 2:
                break
    fallback = word + "x"
    while len(picked) < 2:
        if fallback not in used and fallback not in picked:
            picked.append(fallback)
        fallback += "x"
    return picked[0], picked[1]


def make_saturating_lexicon(
    vocab: tuple[str, ...] = VOCAB,
    identity_count: int = 7,
    variant_counts: tuple[int, int] = (13, 5),
) -> VariantLexicon:
    """Every vocabulary word gets two misspellings plus the identity.

    With the default weights the identity holds 7/25 of the mass, so
    destandardisation rewrites about 72% of covered words. All variant
    surfaces are unique across the lexicon, so normalisation inverts it.
    """
    used = set(vocab)
    entries = {}
    total = 0
    for word in vocab:
        v1, v2 = word_variants(word, used)
        used.update((v1, v2))
        pairs = [(v1, variant_counts[0]), (v2, variant_counts[1]), (word, identity_count)]
        entries[word] = VariantEntry(word, canonical_variants(pairs))
        total += sum(c for _, c in pairs)
    return VariantLexicon(entries=entries, source="synthetic", total_corrections=total)


def write_correction_log(
    path: Union[str, Path], n_rows: int = 1000, seed: int = DEFAULT_SEED
) -> None:
    """Synthetic two-column TSV correction log drawn from the vocabulary."""
    rnd = random.Random(seed)
    lexicon = make_saturating_lexicon()
    words = sorted(lexicon.entries)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fp:
        fp.write("# synthetic correction log: observed<TAB>corrected\n")
        for _ in range(n_rows):
            word = rnd.choice(words)
            surfaces = [s for s, _ in lexicon.entries[word].variants]
            counts = [c for _, c in lexicon.entries[word].variants]
            observed = rnd.choices(surfaces, weights=counts)[0]
            fp.write(f"{observed}\t{word}\n")


def _label_keywords(task: str) -> dict[str, tuple[str, str]]:
    """Two dedicated vocabulary words per label, disjoint across labels."""
    labels = SEQUENCE_LABELS[task]
    offset = sorted(SEQUENCE_LABELS).index(task) * 2 * len(labels)
    pool = VOCAB[offset:] + VOCAB[:offset]
    return {
        label: (pool[2 * k], pool[2 * k + 1])
        for k, label in enumerate(labels)
    }


def _sentence(rnd: random.Random, keyword: Optional[str] = None,
              pool: tuple[str, ...] = VOCAB, length: Optional[int] = None,
              final_stop: bool = False) -> str:
    n = length if length is not None else rnd.randint(7, 11)
    words = [rnd.choice(pool) for _ in range(n)]
    if keyword is not None:
        words[rnd.randrange(n)] = keyword
        if n >= 6:  # second occurrence strengthens the label signal
            words[rnd.randrange(n)] = keyword
    words[0] = words[0][0].upper() + words[0][1:]
    text = " ".join(words)
    if final_stop:
        text += "."
    return text


def make_sequence_dataset(task: str, split: str, count: int, seed: int) -> Dataset:
    rnd = random.Random((seed, task, split).__repr__())
    keywords = _label_keywords(task)
    labels = SEQUENCE_LABELS[task]
    # filler must not collide with any label's keywords, so the mapping
    # from bag of words to label is actually learnable at toy scale
    reserved = {w for pair in keywords.values() for w in pair}
    pool = tuple(w for w in VOCAB if w not in reserved)
    records = []
    for i in range(count):
        label = labels[i % len(labels)]
        keyword = keywords[label][rnd.randrange(2)]
        records.append(Record(
            id=f"{task.lower()}-{split}-{i}",
            kind="sequence",
            text=_sentence(rnd, keyword, pool, final_stop=(task in DESTANDARDISE_TASKS)),
            label=label,
        ))
    return Dataset(task=task, split=split, variant="std", records=records)


def make_pair_dataset(task: str, split: str, count: int, seed: int) -> Dataset:
    rnd = random.Random((seed, task, split).__repr__())
    records = []
    for i in range(count):
        label = str(i % 2)
        text_a = _sentence(rnd)
        if label == "1":
            shared = rnd.choice(text_a.split()).lower()
            text_b = _sentence(rnd, keyword=shared)
        else:
            text_b = _sentence(rnd)
        records.append(Record(
            id=f"{task.lower()}-{split}-{i}", kind="pair",
            text_a=text_a, text_b=text_b, label=label,
        ))
    return Dataset(task=task, split=split, variant="std", records=records)


def _pos_tag_for(word: str) -> str:
    return POS_TAGS[sum(word.encode("utf-8")) % len(POS_TAGS)]


def make_token_dataset(task: str, split: str, count: int, seed: int) -> Dataset:
    rnd = random.Random((seed, task, split).__repr__())
    records = []
    for i in range(count):
        n = rnd.randint(5, 10)
        tokens = [rnd.choice(VOCAB) for _ in range(n)]
        tokens[0] = tokens[0][0].upper() + tokens[0][1:]
        if task == "POS":
            labels = [_pos_tag_for(t.lower()) for t in tokens]
            tokens.append(".")
            labels.append("PUNCT")
        else:
            labels = ["O"] * len(tokens)
            if n >= 4 and rnd.random() < 0.7:
                etype = rnd.choice(NER_ENTITY_TYPES)
                start = rnd.randrange(n - 1)
                span = 1 + (rnd.random() < 0.3)
                labels[start] = f"B-{etype}"
                tokens[start] = tokens[start][0].upper() + tokens[start][1:]
                if span == 2 and start + 1 < n:
                    labels[start + 1] = f"I-{etype}"
                    tokens[start + 1] = tokens[start + 1][0].upper() + tokens[start + 1][1:]
            tokens.append(".")
            labels.append("O")
        records.append(Record(
            id=str(i), kind="token", tokens=tuple(tokens), labels=tuple(labels),
        ))
    return Dataset(task=task, split=split, variant="std", records=records)


def _noisify_token(token: str, lexicon: VariantLexicon) -> str:
    """Replace a standard word with its strongest recorded misspelling."""
    folded = token.lower()
    entry = lexicon.lookup(folded)
    if entry is None:
        return token
    for surface, _ in entry.variants:
        if surface != folded:
            if token[:1].isupper():
                return surface[0].upper() + surface[1:]
            return surface
    return token


def make_noisy_dataset(
    task: str, split: str, count: int, seed: int,
    lexicon: VariantLexicon, rate: float = NOISE_RATE,
) -> Dataset:
    """Non-standard sequence data: each word is misspelt with probability rate."""
    std = make_sequence_dataset(task, split, count, seed)
    rnd = random.Random((seed, task, split, "noise").__repr__())
    records = []
    for rec in std.records:
        words = rec.text.split(" ")
        noisy = [
            _noisify_token(w, lexicon) if rnd.random() < rate else w
            for w in words
        ]
        records.append(Record(id=rec.id, kind="sequence", text=" ".join(noisy), label=rec.label))
    return Dataset(task=task, split=split, variant="n-std", records=records)


def make_dataset(
    task: str, split: str, count: int, seed: int = DEFAULT_SEED,
    lexicon: Optional[VariantLexicon] = None,
) -> Dataset:
    """Native-variant fixture: standard sources for destandardised tasks,
    noisy sources for normalised ones."""
    if task not in TASK_KINDS:
        raise UserError(f"unknown task {task!r}")
    kind = TASK_KINDS[task]
    if kind == "token":
        return make_token_dataset(task, split, count, seed)
    if kind == "pair":
        return make_pair_dataset(task, split, count, seed)
    if task in DESTANDARDISE_TASKS:
        return make_sequence_dataset(task, split, count, seed)
    if lexicon is None:
        lexicon = make_saturating_lexicon()
    return make_noisy_dataset(task, split, count, seed, lexicon)


def native_variant(task: str) -> str:
    return "std" if task in DESTANDARDISE_TASKS else "n-std"


def write_fixture_tree(
    root: Union[str, Path],
    counts: Optional[dict[str, tuple[int, int, int]]] = None,
    seed: int = DEFAULT_SEED,
) -> list[Path]:
    """Write native-variant files for every task under the canonical layout."""
    counts = counts if counts is not None else REFERENCE_COUNTS
    lexicon = make_saturating_lexicon()
    written = []
    for task in counts:
        for split, count in zip(SPLITS, counts[task]):
            ds = make_dataset(task, split, count, seed, lexicon)
            path = dataset_path(root, task, split, native_variant(task))
            write_dataset(ds, path)
            written.append(path)
    return written


PIPELINE_CONFIG_TEMPLATE = """\
[pipeline]
lexicon = "lexicon.tsv"
data_root = "raw"
out_root = "out"
seed = 7
tasks = [{tasks}]

[manifest]
models = ["tiny"]
seeds = [1, 2]
results = "results.jsonl"

{task_tables}
"""


def write_pipeline_fixture(
    root: Union[str, Path],
    tasks: tuple[str, ...] = ("IC", "SC"),
    counts: Optional[dict[str, tuple[int, int, int]]] = None,
    seed: int = DEFAULT_SEED,
) -> Path:
    """Toy end-to-end setup: raw data, lexicon, and a pipeline config.

    Returns the config path; `variaforge pipeline run --config <it>` emits
    all variants, the divergence report, and the experiment manifest.
    """
    root = Path(root)
    counts = counts if counts is not None else TOY_COUNTS
    lexicon = make_saturating_lexicon()
    for task in tasks:
        for split, count in zip(SPLITS, counts[task]):
            ds = make_dataset(task, split, count, seed, lexicon)
            write_dataset(ds, dataset_path(root / "raw", task, split, native_variant(task)))
    save_lexicon(lexicon, root / "lexicon.tsv")
    # from-scratch toy encoder needs a far larger step than the BERT-scale default
    task_tables = "\n".join(
        f"[manifest.tasks.{task}]\nepochs = 6\nlearning_rate = 5e-3\n" for task in tasks
    )
    config = PIPELINE_CONFIG_TEMPLATE.format(
        tasks=", ".join(f'"{t}"' for t in tasks),
        task_tables=task_tables,
    )
    config_path = root / "pipeline.toml"
    config_path.write_text(config, encoding="utf-8")
    return config_path
