from collections import Counter

import pytest

from conftest import make_lexicon
from variaforge.dataset_io import (
    Dataset,
    Record,
    combine,
    dataset_path,
    dataset_stats,
    read_dataset,
    transform_dataset,
    write_dataset,
)
from variaforge.errors import DataError, UserError
from variaforge.transform import TransformPlan

DPLAN = TransformPlan(mode="destandardise", global_seed=5, dataset_id="ds")
NPLAN = TransformPlan(mode="normalise", dataset_id="ds")


def seq_dataset(task="IC", split="train", n=3, variant="std"):
    records = [
        Record(id=f"r{i}", kind="sequence", text=f"de Mann ass grouss {i}", label="intent")
        for i in range(n)
    ]
    return Dataset(task=task, split=split, variant=variant, records=records)


class TestRead:
    def test_conll_block(self, tmp_path):
        path = tmp_path / "x.conll"
        path.write_text("de\tDET\nMann\tNOUN\nass\tVERB\n\n", encoding="utf-8")
        ds = read_dataset(path, "POS", "train")
        assert len(ds) == 1
        assert ds.records[0].tokens == ("de", "Mann", "ass")
        assert ds.records[0].labels == ("DET", "NOUN", "VERB")

    def test_conll_bad_columns(self, tmp_path):
        path = tmp_path / "x.conll"
        path.write_text("de DET\n\n", encoding="utf-8")
        with pytest.raises(DataError, match=":1"):
            read_dataset(path, "POS", "train")

    def test_jsonl_missing_label(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text('{"id": "a", "text": "hello"}\n', encoding="utf-8")
        with pytest.raises(DataError, match="'label'"):
            read_dataset(path, "IC", "train")

    def test_jsonl_unknown_field(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text('{"id": "a", "text": "x", "label": "l", "foo": 1}\n', encoding="utf-8")
        with pytest.raises(DataError, match="unknown field"):
            read_dataset(path, "IC", "train")

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text(
            '{"id": "a", "text": "x", "label": "l"}\n{"id": "a", "text": "y", "label": "l"}\n',
            encoding="utf-8",
        )
        with pytest.raises(DataError, match="duplicate"):
            read_dataset(path, "IC", "train")

    def test_pair_schema(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text('{"id": "a", "text_a": "x", "text_b": "y", "label": "1"}\n',
                        encoding="utf-8")
        ds = read_dataset(path, "WNLI", "dev")
        assert ds.records[0].text_b == "y"

    def test_unknown_task(self, tmp_path):
        with pytest.raises(UserError, match="unknown task"):
            read_dataset(tmp_path / "x.jsonl", "FOO", "train")


class TestWrite:
    @pytest.mark.parametrize("task,maker", [
        ("IC", lambda: seq_dataset("IC")),
        ("WNLI", lambda: Dataset(task="WNLI", split="dev", variant="std", records=[
            Record(id="0", kind="pair", text_a="aa bb", text_b="cc", label="1"),
        ])),
        ("POS", lambda: Dataset(task="POS", split="test", variant="std", records=[
            Record(id="0", kind="token", tokens=("de", "Mann"), labels=("DET", "NOUN")),
            Record(id="1", kind="token", tokens=("ass",), labels=("VERB",)),
        ])),
    ])
    def test_round_trip(self, tmp_path, task, maker):
        ds = maker()
        path = tmp_path / f"{task}.out"
        write_dataset(ds, path)
        back = read_dataset(path, ds.task, ds.split, ds.variant)
        assert back.records == ds.records
        assert (back.task, back.split, back.variant) == (ds.task, ds.split, ds.variant)

    def test_write_deterministic(self, tmp_path):
        ds = seq_dataset()
        p1, p2 = tmp_path / "a", tmp_path / "b"
        write_dataset(ds, p1)
        write_dataset(ds, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_conll_single_trailing_blank_line(self, tmp_path):
        ds = Dataset(task="NER", split="train", variant="std", records=[
            Record(id="0", kind="token", tokens=("a", "b"), labels=("O", "O")),
        ])
        path = tmp_path / "x.conll"
        write_dataset(ds, path)
        assert path.read_text(encoding="utf-8").endswith("O\n\n")
        assert not path.read_text(encoding="utf-8").endswith("\n\n\n")


class TestTransformDataset:
    def test_empty_lexicon_relabels_only(self):
        ds = seq_dataset()
        out = transform_dataset(ds, make_lexicon({}), DPLAN)
        assert out.variant == "n-std"
        assert [r.text for r in out.records] == [r.text for r in ds.records]
        assert [r.id for r in out.records] == [r.id for r in ds.records]

    def test_token_record_transform(self):
        lexicon = make_lexicon({"de": [("den", 1)]})
        ds = Dataset(task="POS", split="train", variant="std", records=[
            Record(id="0", kind="token", tokens=("de", "Mann"), labels=("DET", "NOUN")),
        ])
        out = transform_dataset(ds, lexicon, DPLAN)
        assert out.records[0].tokens == ("den", "Mann")
        assert out.records[0].labels == ("DET", "NOUN")

    def test_punctuation_token_untouched_under_normalise(self):
        lexicon = make_lexicon({"de": [("de", 9)]})
        ds = Dataset(task="POS", split="train", variant="std", records=[
            Record(id="0", kind="token", tokens=("de", "."), labels=("DET", "PUNCT")),
        ])
        out = transform_dataset(ds, lexicon, NPLAN, force=True)
        assert out.records[0].tokens == ("de", ".")

    def test_pair_fields_use_distinct_sites(self):
        # equal-weight entry: identical per-field seeds would leak through
        lexicon = make_lexicon({"ass": [("as", 1), ("ass", 1)]})
        text = " ".join(["ass"] * 24)
        ds = Dataset(task="WNLI", split="train", variant="std", records=[
            Record(id=str(i), kind="pair", text_a=text, text_b=text, label="0")
            for i in range(8)
        ])
        out = transform_dataset(ds, lexicon, DPLAN)
        assert any(r.text_a != r.text_b for r in out.records)

    def test_direction_enforced_unless_forced(self):
        ds = seq_dataset("SC", variant="n-std")
        with pytest.raises(UserError, match="force"):
            transform_dataset(ds, make_lexicon({}), DPLAN)
        forced = transform_dataset(ds, make_lexicon({}), DPLAN, force=True)
        assert forced.variant == "n-std"

    def test_normalise_direction(self):
        lexicon = make_lexicon({"ass": [("as", 3), ("ass", 1)]})
        ds = Dataset(task="SC", split="train", variant="n-std", records=[
            Record(id="0", kind="sequence", text="as de", label="pos"),
        ])
        out = transform_dataset(ds, lexicon, NPLAN)
        assert out.variant == "std"
        assert out.records[0].text == "ass de"

    def test_label_multiset_unchanged_fuzz(self):
        import random
        rnd = random.Random(8)
        lexicon = make_lexicon({"de": [("den", 2), ("de", 1)], "ass": [("as", 1)]})
        records = []
        for i in range(300):
            n = rnd.randint(1, 8)
            tokens = tuple(rnd.choice(["de", "ass", "Mann", "."]) for _ in range(n))
            labels = tuple(rnd.choice(["A", "B"]) for _ in range(n))
            records.append(Record(id=str(i), kind="token", tokens=tokens, labels=labels))
        ds = Dataset(task="NER", split="train", variant="std", records=records)
        out = transform_dataset(ds, lexicon, DPLAN)
        for before, after in zip(ds.records, out.records):
            assert len(after.tokens) == len(after.labels)
            assert Counter(before.labels) == Counter(after.labels)


class TestCombine:
    def test_sizes_and_ids(self):
        std = seq_dataset(n=4)
        nstd = transform_dataset(std, make_lexicon({}), DPLAN)
        comb = combine(std, nstd)
        assert len(comb) == 8
        assert comb.variant == "comb"
        assert [r.id for r in comb.records[:4]] == [r.id for r in std.records]
        assert [r.id for r in comb.records[4:]] == [f"{r.id}#nstd" for r in std.records]

    def test_self_combine_distinct_ids(self):
        std = seq_dataset(n=3)
        relabelled = Dataset(task=std.task, split=std.split, variant="n-std",
                             records=list(std.records))
        comb = combine(std, relabelled)
        assert len({r.id for r in comb.records}) == 6

    def test_mismatches_rejected(self):
        with pytest.raises(DataError, match="task mismatch"):
            combine(seq_dataset("IC"), seq_dataset("TC"))
        with pytest.raises(DataError, match="split mismatch"):
            combine(seq_dataset(split="train"), seq_dataset(split="dev"))
        with pytest.raises(DataError, match="count mismatch"):
            combine(seq_dataset(n=2), seq_dataset(n=3))
        other = seq_dataset(n=2)
        renamed = Dataset(task=other.task, split=other.split, variant="std", records=[
            Record(id="zz", kind="sequence", text="x", label="l"),
            other.records[1],
        ])
        with pytest.raises(DataError, match="id mismatch"):
            combine(seq_dataset(n=2), renamed)


def test_task_kind_consistency_enforced():
    with pytest.raises(DataError, match="does not match task"):
        Dataset(task="NER", split="train", variant="std", records=[
            Record(id="0", kind="sequence", text="x", label="l"),
        ])


def test_stats_roundtrip(tmp_path):
    for split, n in (("train", 5), ("dev", 2), ("test", 3)):
        write_dataset(seq_dataset(split=split, n=n), dataset_path(tmp_path, "IC", split, "std"))
    assert dataset_stats(tmp_path, "IC", "std") == {"train": 5, "dev": 2, "test": 3}
    with pytest.raises(DataError, match="not found"):
        dataset_stats(tmp_path, "TC", "std")
