"""Composable constraint documents evaluated against tool-call arguments.

Each policy is a JSON Schema (draft-07) compiled exactly once at load
time and cached; evaluation never recompiles. The store refuses to load
if any document is malformed -- including regexes inside ``pattern`` /
``patternProperties``, which the schema meta-validation alone would not
catch -- so a misconfigured deployment fails closed at startup instead
of silently skipping rules.
"""

from __future__ import annotations

import fnmatch
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from jsonschema import Draft7Validator
from jsonschema.exceptions import SchemaError

from .model import Category, RiskLevel


class PolicyLoadError(ValueError):
    """A policy document failed to parse or compile; names the policy id."""

    def __init__(self, policy_id: str, reason: str) -> None:
        self.policy_id = policy_id
        super().__init__(f"policy {policy_id!r}: {reason}")


@dataclass(frozen=True)
class Violation:
    policy_id: str
    message: str
    instance_path: str

    def to_wire(self) -> dict:
        return {
            "policy_id": self.policy_id,
            "message": self.message,
            "instance_path": self.instance_path,
        }


@dataclass(frozen=True)
class Policy:
    id: str
    name: str
    category: str  # a Category value or "any"
    risk_level: RiskLevel
    schema: dict
    applies_to_tools: tuple[str, ...] | None = None

    def matches(self, tool_name: str, category: Category) -> bool:
        if self.category != "any" and self.category != category.value:
            return False
        if self.applies_to_tools is not None:
            return any(fnmatch.fnmatchcase(tool_name, glob) for glob in self.applies_to_tools)
        return True


@dataclass
class PolicyStore:
    """Immutable after load; hot reload is modeled as store replacement."""

    policies: tuple[Policy, ...] = ()
    _validators: dict[str, Draft7Validator] = field(default_factory=dict, repr=False)
    compile_count: int = 0

    def __len__(self) -> int:
        return len(self.policies)

    def validate(self, tool_name: str, category: Category, args: Any) -> list[Violation]:
        """Evaluate every matching policy; any violation is grounds to block.

        Policies compose conjunctively and results are deterministic:
        ordered by policy id, then by instance path within a policy.
        """
        violations: list[Violation] = []
        for policy in self.policies:
            if not policy.matches(tool_name, category):
                continue
            validator = self._validators[policy.id]
            errors = sorted(
                validator.iter_errors(args),
                key=lambda e: (list(e.absolute_path), e.message),
            )
            for error in errors:
                path = "/" + "/".join(str(p) for p in error.absolute_path)
                violations.append(
                    Violation(policy_id=policy.id, message=error.message, instance_path=path)
                )
        return violations


def _check_embedded_regexes(node: Any, policy_id: str) -> None:
    """Compile every regex the schema will use, so bad ones fail at load."""
    if isinstance(node, dict):
        for key, value in node.items():
            if key == "pattern" and isinstance(value, str):
                try:
                    re.compile(value)
                except re.error as exc:
                    raise PolicyLoadError(policy_id, f"malformed regex in 'pattern': {exc}") from None
            if key == "patternProperties" and isinstance(value, dict):
                for prop_regex in value:
                    try:
                        re.compile(prop_regex)
                    except re.error as exc:
                        raise PolicyLoadError(
                            policy_id, f"malformed regex in 'patternProperties': {exc}"
                        ) from None
            _check_embedded_regexes(value, policy_id)
    elif isinstance(node, list):
        for item in node:
            _check_embedded_regexes(item, policy_id)


def load_policies(documents: Iterable[dict]) -> PolicyStore:
    """Compile each document once into a reusable validator.

    Raises :class:`PolicyLoadError` naming the offending policy on any
    invalid document; a store with a bad policy must not start.
    """
    policies: list[Policy] = []
    validators: dict[str, Draft7Validator] = {}
    compile_count = 0
    seen: set[str] = set()

    for doc in documents:
        policy_id = str(doc.get("id", "")) or "<missing id>"
        for field_name in ("id", "name", "category", "risk_level", "schema"):
            if field_name not in doc:
                raise PolicyLoadError(policy_id, f"missing field {field_name!r}")
        if policy_id in seen:
            raise PolicyLoadError(policy_id, "duplicate policy id")
        seen.add(policy_id)

        try:
            risk_level = RiskLevel(doc["risk_level"])
        except ValueError:
            raise PolicyLoadError(policy_id, f"unknown risk_level {doc['risk_level']!r}") from None
        category = doc["category"]
        if category != "any":
            try:
                Category(category)
            except ValueError:
                raise PolicyLoadError(policy_id, f"unknown category {category!r}") from None

        schema = doc["schema"]
        try:
            Draft7Validator.check_schema(schema)
        except SchemaError as exc:
            raise PolicyLoadError(policy_id, f"invalid schema: {exc.message}") from None
        _check_embedded_regexes(schema, policy_id)

        applies = doc.get("applies_to_tools")
        policy = Policy(
            id=policy_id,
            name=doc["name"],
            category=category,
            risk_level=risk_level,
            schema=schema,
            applies_to_tools=tuple(applies) if applies is not None else None,
        )
        validators[policy.id] = Draft7Validator(schema)
        compile_count += 1
        policies.append(policy)

    policies.sort(key=lambda p: p.id)
    return PolicyStore(
        policies=tuple(policies),
        _validators=validators,
        compile_count=compile_count,
    )


def load_policy_dir(directory: str | Path) -> PolicyStore:
    """Load one JSON document per ``*.json`` file in the directory."""
    directory = Path(directory)
    documents = []
    for path in sorted(directory.glob("*.json")):
        try:
            documents.append(json.loads(path.read_text()))
        except json.JSONDecodeError as exc:
            raise PolicyLoadError(path.stem, f"invalid JSON in {path.name}: {exc}") from None
    return load_policies(documents)
