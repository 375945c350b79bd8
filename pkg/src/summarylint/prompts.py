"""Modular structured prompt templates.

Each template has five blocks rendered in a fixed order (Role, Context,
Task, Output Format, Final Instructions) with named slots.  The two shipped
templates drive the integrity and linguistic analyses; both are marked
``reconstructed`` in metadata because they were written for this artifact
rather than copied from an external prompt library.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import UnboundSlot
from .iuschema import schema_as_prompt_text

_SLOT = re.compile(r"\{([a-z_]+)\}")

BLOCK_ORDER = ("Role", "Context", "Task", "Output Format", "Final Instructions")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    role_block: str
    context_block: str
    task_block: str
    output_format_block: str
    final_instructions_block: str
    slots: tuple[str, ...] = ()
    metadata: dict = field(default_factory=dict)

    def blocks(self) -> list[tuple[str, str]]:
        return list(
            zip(
                BLOCK_ORDER,
                (
                    self.role_block,
                    self.context_block,
                    self.task_block,
                    self.output_format_block,
                    self.final_instructions_block,
                ),
            )
        )

    def validate(self) -> None:
        for name, text in self.blocks():
            if not text.strip():
                raise UnboundSlot(f"template {self.id!r}: empty {name} block")


def render_prompt(template: PromptTemplate, slot_values: dict[str, str]) -> str:
    """Deterministic, byte-stable rendering in the fixed block order.

    Raises :class:`UnboundSlot` on empty blocks or unbound placeholders.
    """
    template.validate()
    parts = []
    for name, text in template.blocks():
        filled = text
        for m in _SLOT.finditer(text):
            slot = m.group(1)
            if slot not in slot_values:
                raise UnboundSlot(f"template {template.id!r}: slot {slot!r} unbound")
        for slot, value in slot_values.items():
            filled = filled.replace("{" + slot + "}", str(value))
        parts.append(f"# {name}\n\n{filled.strip()}")
    return "\n\n".join(parts) + "\n"


INTEGRITY_TEMPLATE = PromptTemplate(
    id="integrity-v1",
    role_block=(
        "You are a meticulous scientific editor who verifies that every factual "
        "claim in an academic summary is explicitly substantiated by the main "
        "text of the manuscript."
    ),
    context_block=(
        "A manuscript is attached. Its summary sections (Abstract, Conclusions) "
        "must only restate information already established in the IMRaD body.\n"
        "Target section: {section_name}"
    ),
    task_block=(
        "Work through the following steps in order:\n"
        "1. Locate the {section_name} section of the attached manuscript.\n"
        "2. Segment it into numbered sentences.\n"
        "3. Decompose each sentence into discrete Information Units: one unit "
        "per independent claim, with separate units for each quantity and for "
        "each factual qualifier of a quantity.\n"
        "4. Classify every unit using the category system below, recording the "
        "category id and a one-line rationale:\n\n{schema}\n\n"
        "5. Verify each unit against the IMRaD sections, searching the "
        "category's primary location first. A unit is substantiated only when "
        "its content is explicitly stated in the main text; do not accept "
        "paraphrase-level inference or derive numbers from tables or figures.\n"
        "6. Flag every unit that is not fully substantiated."
    ),
    output_format_block=(
        "Produce a plain-text report. For each flagged unit emit one line:\n"
        '- UNSUBSTANTIATED: "<unit text>" (sentence <n>, category <id>)\n'
        "Use PARTIALLY SUBSTANTIATED for units with partial explicit support. "
        "List substantiated units the same way with the marker SUBSTANTIATED."
    ),
    final_instructions_block=(
        "Be strict: explicit statement in the main text is the only acceptable "
        "evidence. Never invent section content. Report every flag, even when "
        "the claim seems like a reasonable summary."
    ),
    slots=("section_name", "schema"),
    metadata={"provenance": "reconstructed", "analysis": "integrity"},
)

LINGUISTIC_TEMPLATE = PromptTemplate(
    id="linguistic-v1",
    role_block=(
        "You are a careful technical copy editor specializing in pronoun "
        "reference clarity in scientific prose."
    ),
    context_block=(
        "A summary section (or full manuscript) is attached. Ambiguous pronouns "
        "such as a standalone \"this\" obscure the antecedent and disrupt the "
        "narrative.\n"
        "Target section: {section_name}\n"
        "Context mode: {context_mode}"
    ),
    task_block=(
        "Work through the following steps in order:\n"
        "1. Locate the {section_name} section and segment it into sentences.\n"
        "2. Identify every third-person or demonstrative pronoun; skip "
        "expletive constructions.\n"
        "3. For each pronoun, deconstruct its clause into its semantic "
        "components: the action (verb), the concept (head of the verb's "
        "object), and all modifiers.\n"
        "4. Collect antecedent candidates only from the {window} sentences "
        "preceding the pronoun; text after the pronoun is never a valid "
        "antecedent.\n"
        "5. Perform a component-wise sufficiency check: each substantive "
        "component must be explicitly supported by the antecedent text.\n"
        "6. Check the action component on its own dedicated branch: an "
        "interpretive verb is supported only if the antecedent states a "
        "result or observation that can actually be demonstrated.\n"
        "7. Mark the pronoun AMBIGUOUS if any component lacks support or no "
        "antecedent exists; otherwise mark it ADEQUATE."
    ),
    output_format_block=(
        "Produce a plain-text report. For each pronoun emit:\n"
        '- AMBIGUOUS: "<pronoun>" (sentence <n>)  or  - ADEQUATE: ...\n'
        "followed by one indented line per component:\n"
        '  <component role> "<component text>": supported|unsupported'
    ),
    final_instructions_block=(
        "Judge support strictly and component by component. Do not let topical "
        "overlap substitute for explicit support, and never use sentences that "
        "follow the pronoun."
    ),
    slots=("section_name", "context_mode", "window"),
    metadata={"provenance": "reconstructed", "analysis": "linguistic"},
)

TEMPLATES = {t.id: t for t in (INTEGRITY_TEMPLATE, LINGUISTIC_TEMPLATE)}


def render_integrity_prompt(section_name: str) -> str:
    return render_prompt(
        INTEGRITY_TEMPLATE,
        {"section_name": section_name, "schema": schema_as_prompt_text()},
    )


def render_linguistic_prompt(section_name: str, context_mode: str, window: int) -> str:
    return render_prompt(
        LINGUISTIC_TEMPLATE,
        {"section_name": section_name, "context_mode": context_mode, "window": str(window)},
    )
