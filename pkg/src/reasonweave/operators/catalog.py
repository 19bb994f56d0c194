"""Prompt catalog: operator templates loaded from files, never hard-coded."""
from __future__ import annotations

import re
import time
from importlib import resources
from pathlib import Path
from typing import Union

from ..providers.errors import MissingPlaceholder, ProviderError

PLACEHOLDER_RE = re.compile(r"\{([a-z][a-z0-9_]*)\}")

STRUCTURE = "structure"
GROUP = "group"
CLARIFY = "clarify"
LINK = "link"
SUMMARIZE = "summarize"
FOLLOW_UP = "follow_up"
BRANCH = "branch"
REGENERATE = "regenerate"


class PromptCatalog:
    def __init__(self, templates: dict[str, str]):
        self._templates = dict(templates)

    @classmethod
    def from_dir(cls, path: Union[str, Path]) -> "PromptCatalog":
        templates = {}
        for file in sorted(Path(path).glob("*.txt")):
            templates[file.stem] = file.read_text(encoding="utf-8")
        return cls(templates)

    @classmethod
    def default(cls) -> "PromptCatalog":
        templates = {}
        for entry in resources.files("reasonweave.prompts").iterdir():
            if entry.name.endswith(".txt"):
                templates[entry.name[:-4]] = entry.read_text(encoding="utf-8")
        return cls(templates)

    def __contains__(self, template_id: str) -> bool:
        return template_id in self._templates

    def body(self, template_id: str) -> str:
        if template_id not in self._templates:
            raise LookupError(f"no template named '{template_id}'")
        return self._templates[template_id]

    def placeholders(self, template_id: str) -> set[str]:
        return set(PLACEHOLDER_RE.findall(self.body(template_id)))

    def render(self, template_id: str, **bindings) -> str:
        body = self.body(template_id)
        missing = [name for name in self.placeholders(template_id) if name not in bindings]
        if missing:
            raise MissingPlaceholder(
                f"template '{template_id}' is missing bindings for: {', '.join(sorted(missing))}")
        return PLACEHOLDER_RE.sub(lambda m: str(bindings[m.group(1)]), body)


def complete_with_retry(provider, template_id: str, prompt: str,
                        backoff_base: float = 1.0) -> str:
    """One retry with exponential backoff, then the error propagates.

    Callers own the documented fallback that applies after the second
    failure.
    """
    try:
        return provider.complete(template_id, prompt)
    except ProviderError:
        if backoff_base > 0:
            time.sleep(backoff_base)
        return provider.complete(template_id, prompt)
