"""Annotation prompt assembly from bundled exemplar templates."""

from __future__ import annotations

from importlib import resources

from ..errors import TemplateMissingError

SYSTEM_INSTRUCTION = (
    "You are a JSON-to-CadQuery translator. Given a CAD sequence JSON that "
    "describes sketches and extrusions, write a CadQuery (Python) script "
    "that builds the same solid and exports it to a single STL file. "
    "Here are two examples:"
)

CLOSING_INSTRUCTION = (
    "Your output must contain only executable Python code, and must start "
    "with import."
)

_TEMPLATES = ("exemplar_1.json", "exemplar_1.py", "exemplar_2.json", "exemplar_2.py")


def load_template(name: str) -> str:
    ref = resources.files(__package__) / "templates" / name
    try:
        return ref.read_text()
    except (FileNotFoundError, OSError) as exc:
        raise TemplateMissingError(f"bundled template {name} missing") from exc


def assemble_prompt(minimal_json: str) -> str:
    """System framing, two worked JSON-to-code exemplars, the target JSON,
    then the output-format instruction."""
    if not minimal_json.strip():
        raise ValueError("minimal_json must be nonempty")
    ex1_json, ex1_code, ex2_json, ex2_code = (load_template(n) for n in _TEMPLATES)
    sections = [
        SYSTEM_INSTRUCTION,
        "1. CAD Sequence (JSON)",
        ex1_json.strip(),
        "1. CadQuery Code",
        ex1_code.strip(),
        "2. CAD Sequence (JSON)",
        ex2_json.strip(),
        "2. CadQuery Code",
        ex2_code.strip(),
        "3. CAD Sequence (JSON)",
        minimal_json.strip(),
        "3. CadQuery Code",
        CLOSING_INSTRUCTION,
    ]
    return "\n\n".join(sections)
