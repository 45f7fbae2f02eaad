import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from variaforge.cli import main as cli_main
from variaforge.lexicon import VariantEntry, VariantLexicon, canonical_variants


def make_lexicon(entry_specs: dict[str, list[tuple[str, int]]]) -> VariantLexicon:
    """Hand-built lexicon; entry_specs maps standard form -> variant pairs."""
    entries = {
        standard: VariantEntry(standard, canonical_variants(pairs))
        for standard, pairs in entry_specs.items()
    }
    total = sum(c for pairs in entry_specs.values() for _, c in pairs)
    return VariantLexicon(entries=entries, total_corrections=total)


@pytest.fixture
def toy_lexicon():
    return make_lexicon({
        "ass": [("as", 3), ("ass", 1)],
        "grouss": [("grous", 1)],
        "de": [("den", 2), ("de", 1)],
    })


@pytest.fixture
def run_cli(capsys):
    def run(*argv):
        code = cli_main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run
