"""Schema, validator, and renderer for sociolinguistic language cards.

A card describes a linguistic entity (language or variety) through eight
sociolinguistic criteria plus risk notes for five NLP work domains, so a
dataset can ship with an explicit account of whose language it contains
and where variation will bite the pipeline. Cards are prose-valued: the
validator enforces presence and shape, never content.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import yaml

from variaforge.errors import DataError, UserError

CRITERIA_KEYS = (
    "sociolinguistic_setting",
    "institutional_support",
    "structural_independence",
    "degree_of_codification",
    "domain_specificity",
    "school_education",
    "communicative_range",
    "attitudes_and_ideologies",
)
NLP_DOMAIN_KEYS = ("data", "preprocessing", "modelling", "evaluation", "usage")

_TITLES = {
    "sociolinguistic_setting": "Sociolinguistic setting",
    "institutional_support": "Institutional support",
    "structural_independence": "Structural independence",
    "degree_of_codification": "Degree of codification",
    "domain_specificity": "Domain specificity",
    "school_education": "School education",
    "communicative_range": "Communicative range",
    "attitudes_and_ideologies": "Attitudes and ideologies",
    "data": "Data",
    "preprocessing": "Preprocessing",
    "modelling": "Modelling",
    "evaluation": "Evaluation",
    "usage": "Usage",
}

REQUIRED_TOP_KEYS = ("entity_name", "version", "criteria", "nlp_domain_notes")
OPTIONAL_TOP_KEYS = ("notes",)

PLACEHOLDER_MARKER = "TODO:"

BUNDLED_CARD = Path(__file__).parent / "data" / "luxembourgish_card.yaml"


@dataclass(frozen=True)
class Violation:
    key: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.key}: [{self.rule}] {self.message}"


def parse_card(document: Union[str, dict]) -> dict:
    """Accept YAML or JSON text (JSON is a YAML subset) or a parsed mapping."""
    if isinstance(document, dict):
        return document
    try:
        parsed = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise DataError(f"card does not parse: {exc}") from None
    if not isinstance(parsed, dict):
        raise DataError("card must be a mapping at the top level")
    return parsed


def load_card(path: Union[str, Path]) -> dict:
    return parse_card(Path(path).read_text(encoding="utf-8"))


def _entry_text(value) -> tuple[str | None, str | None]:
    """(text, problem-rule): value is a string or {text, sources}."""
    if isinstance(value, str):
        return value, None
    if isinstance(value, dict):
        extra = set(value) - {"text", "sources"}
        if extra:
            return None, "unknown-key"
        text = value.get("text")
        if not isinstance(text, str):
            return None, "malformed"
        sources = value.get("sources", [])
        if not isinstance(sources, list) or any(not isinstance(s, str) for s in sources):
            return None, "malformed"
        return text, None
    return None, "malformed"


def _check_section(card, section_key, expected_keys, violations):
    section = card.get(section_key)
    if not isinstance(section, dict):
        violations.append(Violation(section_key, "missing", f"{section_key} must be a mapping"))
        return
    for key in expected_keys:
        if key not in section:
            violations.append(Violation(key, "missing", f"required key {key!r} absent"))
            continue
        text, problem = _entry_text(section[key])
        if problem is not None:
            violations.append(Violation(
                key, problem, "value must be text or {text, sources} with string sources"
            ))
            continue
        if not text.strip():
            violations.append(Violation(key, "empty", "empty criterion"))
        elif text.lstrip().startswith(PLACEHOLDER_MARKER):
            violations.append(Violation(key, "placeholder", "placeholder text not yet edited"))
    for key in section:
        if key not in expected_keys:
            violations.append(Violation(key, "unknown-key", f"{key!r} is not a known {section_key} key"))


def validate_card(document: Union[str, dict]) -> list[Violation]:
    """Empty list iff the card satisfies the schema; never raises on content."""
    card = parse_card(document)
    violations: list[Violation] = []
    for key in card:
        if key not in REQUIRED_TOP_KEYS and key not in OPTIONAL_TOP_KEYS:
            violations.append(Violation(key, "unknown-key", f"{key!r} is not a card field"))
    for key in ("entity_name", "version"):
        value = card.get(key)
        if not isinstance(value, str) or not value.strip():
            violations.append(Violation(key, "missing", f"{key} must be a non-empty string"))
    _check_section(card, "criteria", CRITERIA_KEYS, violations)
    _check_section(card, "nlp_domain_notes", NLP_DOMAIN_KEYS, violations)
    if "notes" in card and not isinstance(card["notes"], str):
        violations.append(Violation("notes", "malformed", "notes must be a string"))
    return violations


def render_card(document: Union[str, dict]) -> str:
    """Deterministic sectioned text; criteria first, then NLP domains."""
    card = parse_card(document)
    violations = validate_card(card)
    if violations:
        raise DataError(
            "cannot render an invalid card: " + "; ".join(str(v) for v in violations)
        )
    lines = [f"# Language card: {card['entity_name']}", "", f"Version: {card['version']}", ""]
    lines.append("## Sociolinguistic criteria")
    lines.append("")
    for key in CRITERIA_KEYS:
        text, _ = _entry_text(card["criteria"][key])
        sources = []
        if isinstance(card["criteria"][key], dict):
            sources = card["criteria"][key].get("sources", [])
        lines.append(f"### {_TITLES[key]}")
        lines.append("")
        lines.append(text.strip())
        if sources:
            lines.append("")
            lines.append("Sources: " + "; ".join(sources))
        lines.append("")
    lines.append("## NLP domain notes")
    lines.append("")
    for key in NLP_DOMAIN_KEYS:
        text, _ = _entry_text(card["nlp_domain_notes"][key])
        sources = []
        if isinstance(card["nlp_domain_notes"][key], dict):
            sources = card["nlp_domain_notes"][key].get("sources", [])
        lines.append(f"### {_TITLES[key]}")
        lines.append("")
        lines.append(text.strip())
        if sources:
            lines.append("")
            lines.append("Sources: " + "; ".join(sources))
        lines.append("")
    if card.get("notes"):
        lines.append("## Notes")
        lines.append("")
        lines.append(card["notes"].strip())
        lines.append("")
    return "\n".join(lines)


def new_card_template(entity_name: str) -> str:
    """YAML skeleton; every value is a placeholder that fails validation."""
    if not entity_name or not entity_name.strip():
        raise UserError("entity name must be non-empty")
    doc = {
        "entity_name": entity_name,
        "version": "0.1",
        "criteria": {
            key: f"{PLACEHOLDER_MARKER} describe {_TITLES[key].lower()}"
            for key in CRITERIA_KEYS
        },
        "nlp_domain_notes": {
            key: f"{PLACEHOLDER_MARKER} assess risks in the {_TITLES[key].lower()} domain"
            for key in NLP_DOMAIN_KEYS
        },
    }
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True, width=88)
