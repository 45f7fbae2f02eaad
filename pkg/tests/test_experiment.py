import json
import math
import random

import pytest

from variaforge.errors import DataError, UserError
from variaforge.experiment import (
    DEFAULT_SEEDS,
    build_manifest,
    collect_results,
    default_hyperparams,
    load_manifest,
    render_matrix,
    save_manifest,
)
from variaforge.fixtures import write_fixture_tree
from variaforge.metrics import VARIANTS, ScoreRecord

ALL_TASKS = ("IC", "NER", "POS", "WNLI", "TC", "SC", "CM")


@pytest.fixture(scope="module")
def data_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("grid")
    counts = {task: (4, 2, 2) for task in ALL_TASKS}
    write_fixture_tree(root, counts)
    # the grid needs every variant present; fake the missing ones by copying
    from variaforge.dataset_io import SPLITS, dataset_path
    for task in ALL_TASKS:
        native = "std" if task not in ("SC", "CM") else "n-std"
        for split in SPLITS:
            src = dataset_path(root, task, split, native)
            for variant in VARIANTS:
                dst = dataset_path(root, task, split, variant)
                if not dst.exists():
                    dst.write_bytes(src.read_bytes())
    return root


def write_config(tmp_path, data_root, body_extra="", tasks=ALL_TASKS, seeds="[1,2,3,4,5]"):
    config = tmp_path / "exp.toml"
    tables = "\n".join(f"[tasks.{t}]" for t in tasks)
    config.write_text(
        f"""
[experiment]
models = ["m1"]
seeds = {seeds}
results = "results.jsonl"
data_root = "{data_root}"
{body_extra}

{tables}
""",
        encoding="utf-8",
    )
    return config


class TestBuildManifest:
    def test_grid_arithmetic(self, tmp_path, data_root):
        manifest = build_manifest(write_config(tmp_path, data_root))
        assert len(manifest.cells()) == 1 * 7 * 3 * 5 == 105
        assert manifest.evaluation_count() == 315

    def test_defaults_from_reference_settings(self, tmp_path, data_root):
        manifest = build_manifest(write_config(tmp_path, data_root))
        by_task = {t.task: t for t in manifest.tasks}
        assert by_task["TC"].learning_rate == pytest.approx(2e-5)
        assert by_task["IC"].learning_rate == pytest.approx(5e-5)
        assert by_task["NER"].epochs == 3
        assert by_task["POS"].epochs == 3
        assert by_task["IC"].epochs == 5
        assert all(t.batch_size == 16 for t in manifest.tasks)

    def test_unknown_task_rejected(self, tmp_path, data_root):
        config = write_config(tmp_path, data_root, tasks=("FOO",))
        with pytest.raises(UserError, match="FOO"):
            build_manifest(config)

    def test_missing_variant_rejected(self, tmp_path, data_root):
        from variaforge.dataset_io import dataset_path
        missing_root = tmp_path / "partial"
        missing_root.mkdir()
        src = dataset_path(data_root, "IC", "train", "std")
        dst = dataset_path(missing_root, "IC", "train", "std")
        dst.parent.mkdir(parents=True)
        dst.write_bytes(src.read_bytes())
        config = write_config(tmp_path, missing_root, tasks=("IC",))
        with pytest.raises(UserError, match="missing dataset variant"):
            build_manifest(config)

    def test_default_seeds(self, tmp_path, data_root):
        config = tmp_path / "noseeds.toml"
        config.write_text(
            f"""
[experiment]
models = ["m1"]
data_root = "{data_root}"
results = "r.jsonl"

[tasks.IC]
""",
            encoding="utf-8",
        )
        manifest = build_manifest(config)
        assert manifest.seeds == DEFAULT_SEEDS

    def test_save_load_round_trip(self, tmp_path, data_root):
        manifest = build_manifest(write_config(tmp_path, data_root))
        out = tmp_path / "manifest.json"
        save_manifest(manifest, out)
        loaded = load_manifest(out)
        assert loaded.models == manifest.models
        assert loaded.seeds == manifest.seeds
        assert [t.task for t in loaded.tasks] == [t.task for t in manifest.tasks]
        assert [c.cell_id for c in loaded.cells()] == [c.cell_id for c in manifest.cells()]
        with open(out, encoding="utf-8") as fp:
            raw = json.load(fp)
        assert [c["cell_id"] for c in raw["cells"]] == [c.cell_id for c in manifest.cells()]


def records_for_cell(task, train, test, scores, model="m1"):
    return [
        ScoreRecord(task, train, test, seed, score, model=model,
                    cell_id=f"{model}__{task}__{train}__s{seed}")
        for seed, score in enumerate(scores, start=1)
    ]


def full_grid_records(task="IC", model="m1", scores=(57.0, 58.0, 59.0, 57.5, 58.5)):
    records = []
    for train in VARIANTS:
        for test in VARIANTS:
            records.extend(records_for_cell(task, train, test, scores, model))
    return records


class TestCollect:
    def write_results(self, tmp_path, records):
        path = tmp_path / "results.jsonl"
        with open(path, "w", encoding="utf-8") as fp:
            for rec in records:
                fp.write(json.dumps(rec.to_dict()) + "\n")
        return path

    def test_complete_cell_accepted(self, tmp_path):
        path = self.write_results(tmp_path, full_grid_records())
        report = collect_results(path)
        assert len(report.records) == 45
        assert report.warnings == []

    def test_duplicate_seed_rejected(self, tmp_path):
        records = full_grid_records()
        path = self.write_results(tmp_path, records + records[:1])
        with pytest.raises(DataError, match="duplicate"):
            collect_results(path)

    def test_missing_seed_warned(self, tmp_path):
        records = full_grid_records()
        dropped = [r for r in records
                   if not (r.train_variant == "std" and r.test_variant == "std" and r.seed == 4)]
        path = self.write_results(tmp_path, dropped)
        report = collect_results(path)
        assert len(report.warnings) == 1
        assert "seed=4" in report.warnings[0]

    def test_schema_violation_carries_line_number(self, tmp_path):
        path = tmp_path / "results.jsonl"
        path.write_text('{"task": "IC"}\n', encoding="utf-8")
        with pytest.raises(DataError, match=":1"):
            collect_results(path)


class TestRenderMatrix:
    def test_reference_cell_format(self):
        d = 2.18 / math.sqrt(2.5)
        scores = [57.97 + d * k for k in (-2, -1, 0, 1, 2)]
        records = []
        for train in VARIANTS:
            for test in VARIANTS:
                records.extend(records_for_cell("IC", train, test, scores))
        matrix = render_matrix(records, "m1", "IC")
        assert "57.97 ± 2.18" in matrix.text
        assert matrix.cells["std"]["std"]["n"] == 5

    def test_single_seed_std_zero(self):
        records = []
        for train in VARIANTS:
            for test in VARIANTS:
                records.extend(records_for_cell("IC", train, test, [61.234]))
        matrix = render_matrix(records, "m1", "IC")
        assert "61.23 ± 0.00" in matrix.text

    def test_permutation_invariant(self):
        records = full_grid_records()
        rnd = random.Random(1)
        shuffled = records[:]
        rnd.shuffle(shuffled)
        assert render_matrix(records, "m1", "IC").text == render_matrix(shuffled, "m1", "IC").text

    def test_incomplete_grid_rejected(self):
        records = full_grid_records()
        partial = [r for r in records
                   if not (r.train_variant == "comb" and r.test_variant == "n-std")]
        with pytest.raises(DataError, match="incomplete grid"):
            render_matrix(partial, "m1", "IC")

    def test_rows_and_columns_ordered(self):
        matrix = render_matrix(full_grid_records(), "m1", "IC")
        lines = matrix.text.strip().split("\n")
        assert lines[1].split()[-3:] == ["std", "n-std", "comb"]
        assert [l.split()[0] for l in lines[2:]] == ["std", "n-std", "comb"]


def test_default_hyperparams_unknown_task():
    with pytest.raises(UserError):
        default_hyperparams("XYZ")
