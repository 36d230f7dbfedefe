"""Election, project and method configuration shared by all other modules.

All types are immutable value objects. ``parse_config`` / ``serialize_config``
handle the strict JSON configuration document; ``validate_config`` checks the
semantic invariants and reports violations as data rather than raising.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .errors import ConfigParseError


class Method(str, enum.Enum):
    """The six supported ballot methods."""

    K_APPROVAL = "k_approval"
    K_RANKING = "k_ranking"
    KNAPSACK = "knapsack"
    PAIRWISE = "pairwise"
    CUMULATIVE = "cumulative"
    QUADRATIC = "quadratic"


#: Methods whose ballots distribute tokens with a cost rule.
DISTRIBUTIONAL_METHODS = frozenset({Method.CUMULATIVE, Method.QUADRATIC})

#: Methods whose ballots are a set of approved projects.
APPROVAL_METHODS = frozenset({Method.K_APPROVAL, Method.KNAPSACK})


class UIVariant(str, enum.Enum):
    """Voter-interface layout; the value is the wire letter."""

    NONE = "A"
    TOP_BAR = "B"
    SIDE_BAR = "C"
    TOP_AND_SIDE_BAR = "D"


@dataclass(frozen=True)
class Project:
    """A candidate project voters can support.

    ``cost`` is a non-negative integer in currency minor units.
    """

    id: str
    title: str
    cost: int
    description: str | None = None


@dataclass(frozen=True)
class MethodSpec:
    """Ballot method plus its parameters.

    Exactly the parameters the method needs may be present:
    ``token_budget`` (and optionally ``per_project_cap``) for cumulative and
    quadratic, ``k`` for k-approval and k-ranking, none for knapsack and
    pairwise. ``validate_config`` enforces this.
    """

    method: Method
    token_budget: int | None = None
    k: int | None = None
    per_project_cap: int | None = None


@dataclass(frozen=True)
class ElectionConfig:
    """A full election: projects, monetary budget, method and UI variant."""

    id: str
    name: str
    projects: tuple[Project, ...]
    monetary_budget: int
    method_spec: MethodSpec
    ui_variant: UIVariant
    open: bool = True

    def project_ids(self) -> frozenset[str]:
        return frozenset(p.id for p in self.projects)

    def project_by_id(self, project_id: str) -> Project | None:
        for p in self.projects:
            if p.id == project_id:
                return p
        return None


@dataclass(frozen=True)
class Violation:
    """One semantic rule violation; ``code`` is stable, ``subject`` names the
    offending field or id when there is one."""

    code: str
    subject: str | None = None
    detail: str | None = None

    def __str__(self) -> str:
        parts = [self.code]
        if self.subject is not None:
            parts.append(self.subject)
        if self.detail is not None:
            parts.append(self.detail)
        return ": ".join(parts)


def validate_config(config: ElectionConfig) -> list[Violation]:
    """Check all semantic invariants; an empty list means the config is valid.

    Violations are data, not faults: arbitrary parsed configs are accepted.
    """
    violations: list[Violation] = []

    if not config.id:
        violations.append(Violation("empty_election_id"))
    if len(config.projects) < 2:
        violations.append(
            Violation("too_few_projects", detail=f"{len(config.projects)} < 2")
        )
    if config.monetary_budget <= 0:
        violations.append(
            Violation("monetary_budget_not_positive", detail=str(config.monetary_budget))
        )

    seen: set[str] = set()
    for project in config.projects:
        if not project.id:
            violations.append(Violation("empty_project_id"))
        elif project.id in seen:
            violations.append(Violation("duplicate_project_id", subject=project.id))
        seen.add(project.id)
        if project.cost < 0:
            violations.append(
                Violation("negative_project_cost", subject=project.id, detail=str(project.cost))
            )

    violations.extend(_validate_method_spec(config.method_spec, len(config.projects)))
    return violations


def _validate_method_spec(spec: MethodSpec, n_projects: int) -> list[Violation]:
    violations: list[Violation] = []
    method = spec.method

    if method in DISTRIBUTIONAL_METHODS:
        if spec.token_budget is None:
            violations.append(Violation("missing_token_budget", subject=method.value))
        elif spec.token_budget <= 0:
            violations.append(
                Violation("token_budget_not_positive", detail=str(spec.token_budget))
            )
        if spec.k is not None:
            violations.append(Violation("unexpected_k", subject=method.value))
        if spec.per_project_cap is not None:
            if spec.per_project_cap <= 0:
                violations.append(
                    Violation("per_project_cap_not_positive", detail=str(spec.per_project_cap))
                )
            elif spec.token_budget is not None and spec.per_project_cap > spec.token_budget:
                violations.append(
                    Violation(
                        "cap_exceeds_token_budget",
                        detail=f"{spec.per_project_cap} > {spec.token_budget}",
                    )
                )
    elif method in (Method.K_APPROVAL, Method.K_RANKING):
        if spec.k is None:
            violations.append(Violation("missing_k", subject=method.value))
        elif spec.k <= 0:
            violations.append(Violation("k_not_positive", detail=str(spec.k)))
        elif spec.k > n_projects:
            violations.append(
                Violation("k_exceeds_projects", detail=f"{spec.k} > {n_projects}")
            )
        if spec.token_budget is not None:
            violations.append(Violation("unexpected_token_budget", subject=method.value))
        if spec.per_project_cap is not None:
            violations.append(Violation("unexpected_per_project_cap", subject=method.value))
    else:  # knapsack, pairwise: no parameters
        if spec.token_budget is not None:
            violations.append(Violation("unexpected_token_budget", subject=method.value))
        if spec.k is not None:
            violations.append(Violation("unexpected_k", subject=method.value))
        if spec.per_project_cap is not None:
            violations.append(Violation("unexpected_per_project_cap", subject=method.value))

    return violations


# --- configuration document (strict JSON) ---------------------------------

_TOP_FIELDS = frozenset({"id", "name", "monetary_budget", "method", "ui_variant", "projects", "open"})
_TOP_REQUIRED = ("id", "name", "monetary_budget", "method", "ui_variant", "projects")
_METHOD_FIELDS = frozenset({"type", "token_budget", "k", "per_project_cap"})
_PROJECT_FIELDS = frozenset({"id", "title", "cost", "description"})


def parse_config(text: str) -> ElectionConfig:
    """Parse a configuration document into an ElectionConfig.

    Unknown fields are rejected; the returned config is structurally sound
    but not yet semantically validated (run ``validate_config`` for that).

    Raises:
        ConfigParseError: malformed JSON or schema problem, with the
            offending field in ``.field`` where applicable.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(data)


def config_from_dict(data: object) -> ElectionConfig:
    """Strict decode of an already-parsed configuration document."""
    obj = _expect_object(data, "<document>")
    _reject_unknown(obj, _TOP_FIELDS, "<document>")
    for name in _TOP_REQUIRED:
        if name not in obj:
            raise ConfigParseError(f"missing required field '{name}'", field=name)

    method_obj = _expect_object(obj["method"], "method")
    _reject_unknown(method_obj, _METHOD_FIELDS, "method")
    if "type" not in method_obj:
        raise ConfigParseError("missing required field 'method.type'", field="method.type")
    method = _expect_enum(method_obj["type"], Method, "method.type")
    spec = MethodSpec(
        method=method,
        token_budget=_expect_opt_int(method_obj.get("token_budget"), "method.token_budget"),
        k=_expect_opt_int(method_obj.get("k"), "method.k"),
        per_project_cap=_expect_opt_int(method_obj.get("per_project_cap"), "method.per_project_cap"),
    )

    projects_raw = obj["projects"]
    if not isinstance(projects_raw, list):
        raise ConfigParseError("field 'projects' must be an array", field="projects")
    projects = []
    for i, item in enumerate(projects_raw):
        locus = f"projects[{i}]"
        proj_obj = _expect_object(item, locus)
        _reject_unknown(proj_obj, _PROJECT_FIELDS, locus)
        for name in ("id", "title", "cost"):
            if name not in proj_obj:
                raise ConfigParseError(
                    f"missing required field '{locus}.{name}'", field=f"{locus}.{name}"
                )
        projects.append(
            Project(
                id=_expect_str(proj_obj["id"], f"{locus}.id"),
                title=_expect_str(proj_obj["title"], f"{locus}.title"),
                cost=_expect_int(proj_obj["cost"], f"{locus}.cost"),
                description=_expect_opt_str(proj_obj.get("description"), f"{locus}.description"),
            )
        )

    open_raw = obj.get("open", True)
    if not isinstance(open_raw, bool):
        raise ConfigParseError("field 'open' must be a boolean", field="open")

    return ElectionConfig(
        id=_expect_str(obj["id"], "id"),
        name=_expect_str(obj["name"], "name"),
        projects=tuple(projects),
        monetary_budget=_expect_int(obj["monetary_budget"], "monetary_budget"),
        method_spec=spec,
        ui_variant=_expect_enum(obj["ui_variant"], UIVariant, "ui_variant"),
        open=open_raw,
    )


def config_to_dict(config: ElectionConfig) -> dict:
    """Inverse of ``config_from_dict``; omits optional fields at defaults."""
    method: dict = {"type": config.method_spec.method.value}
    if config.method_spec.token_budget is not None:
        method["token_budget"] = config.method_spec.token_budget
    if config.method_spec.k is not None:
        method["k"] = config.method_spec.k
    if config.method_spec.per_project_cap is not None:
        method["per_project_cap"] = config.method_spec.per_project_cap

    projects = []
    for p in config.projects:
        item: dict = {"id": p.id, "title": p.title, "cost": p.cost}
        if p.description is not None:
            item["description"] = p.description
        projects.append(item)

    doc: dict = {
        "id": config.id,
        "name": config.name,
        "monetary_budget": config.monetary_budget,
        "method": method,
        "ui_variant": config.ui_variant.value,
        "projects": projects,
    }
    if not config.open:
        doc["open"] = False
    return doc


def serialize_config(config: ElectionConfig) -> str:
    """Serialize to the configuration document format.

    ``parse_config(serialize_config(c)) == c`` for every config.
    """
    return json.dumps(config_to_dict(config), indent=2, ensure_ascii=False) + "\n"


# --- strict decoding helpers -----------------------------------------------

def _expect_object(value: object, locus: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigParseError(f"field '{locus}' must be an object", field=locus)
    return value


def _reject_unknown(obj: dict, allowed: frozenset[str], locus: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigParseError(f"unknown field '{key}' in {locus}", field=key)


def _expect_str(value: object, locus: str) -> str:
    if not isinstance(value, str):
        raise ConfigParseError(f"field '{locus}' must be a string", field=locus)
    return value


def _expect_opt_str(value: object, locus: str) -> str | None:
    return None if value is None else _expect_str(value, locus)


def _expect_int(value: object, locus: str) -> int:
    # bool is an int subclass; a config saying "cost": true is a type error
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigParseError(f"field '{locus}' must be an integer", field=locus)
    return value


def _expect_opt_int(value: object, locus: str) -> int | None:
    return None if value is None else _expect_int(value, locus)


def _expect_enum(value: object, enum_type, locus: str):
    if isinstance(value, str):
        try:
            return enum_type(value)
        except ValueError:
            pass
    allowed = ", ".join(repr(m.value) for m in enum_type)
    raise ConfigParseError(f"field '{locus}' must be one of {allowed}", field=locus)
