"""Command-line driver: ``nahmforge verify | eval | modularity``.

Exit codes: 0 when every check passes, 1 on a mathematical failure, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import click

from . import modularity
from .nahm import DomainError, NahmSpec, eval_nahm, parse_builtin
from .series import format_series
from .suites import SUITES, run_suite, suite_tasks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
R_BOUNDS = (2, 8)
MAX_TOL = 1e-4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    r_min: int = 2
    r_max: int = 5
    order: int | None = None
    tolerance: float = 1e-8
    terms: int | None = None
    suites: list[str] = field(default_factory=lambda: list(SUITES))
    output: str | None = None
    format: str = "text"

    def validate(self) -> "RunConfig":
        lo, hi = R_BOUNDS
        if not (lo <= self.r_min <= self.r_max <= hi):
            raise ConfigError(f"need {lo} <= r_min <= r_max <= {hi}, got {self.r_min}..{self.r_max}")
        if self.order is not None and self.order < 10:
            raise ConfigError(f"order must be at least 10, got {self.order}")
        if not (0 < self.tolerance <= MAX_TOL):
            raise ConfigError(f"tolerance must lie in (0, {MAX_TOL}], got {self.tolerance}")
        if self.terms is not None and self.terms < 1:
            raise ConfigError(f"terms must be positive, got {self.terms}")
        bad = [s for s in self.suites if s not in SUITES]
        if bad or not self.suites:
            raise ConfigError(f"suites must be a non-empty subset of {list(SUITES)}, got {self.suites}")
        if self.format not in ("text", "json"):
            raise ConfigError(f"format must be 'text' or 'json', got {self.format!r}")
        return self

    def to_json(self) -> dict:
        return asdict(self)


def parse_r_range(text: str) -> tuple[int, int]:
    """``"A..B"`` or ``"A"`` to an inclusive rank range."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return int(a), int(b)
        return int(text), int(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse rank range {text!r}; expected A..B") from exc


def load_config(path: str | Path) -> dict:
    """Read a flat JSON config; a saved ``verify`` report is accepted through its ``config`` key."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("config"), dict):
        data = data["config"]
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}")
    return data


def build_config(file_values: dict, overrides: dict) -> RunConfig:
    values = {**file_values, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def _usage(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_USAGE)


def _canonical(results: list[dict]) -> list[dict]:
    return sorted(results, key=lambda d: json.dumps(d, sort_keys=True))


def _write_json(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


@click.group()
def main() -> None:
    """Exact q-series identities, Bailey audits, eta-quotient levels and transform checks."""


@main.command()
@click.option("--suite", "suites", multiple=True, help="Suite to run (repeatable); default all.")
@click.option("--r", "r_range", help="Rank range A..B.")
@click.option("--order", type=int, help="Truncation order in q-units.")
@click.option("--tol", type=float, help="Numeric tolerance for transform checks.")
@click.option("--terms", type=int, help="Cap on product factors in numeric evaluations.")
@click.option("--json", "json_path", help="Write a JSON report here.")
@click.option("--config", "config_path", help="Flat JSON config; flags override its values.")
def verify(suites, r_range, order, tol, terms, json_path, config_path) -> None:
    """Run verification suites."""
    try:
        file_values = load_config(config_path) if config_path else {}
        overrides = {"order": order, "tolerance": tol, "terms": terms, "output": json_path}
        if suites:
            overrides["suites"] = list(suites)
        if r_range:
            overrides["r_min"], overrides["r_max"] = parse_r_range(r_range)
        if json_path:
            overrides["format"] = "json"
        cfg = build_config(file_values, overrides)
    except ConfigError as exc:
        _usage(str(exc))
    tasks = []
    for suite in SUITES:  # fixed dependency order
        if suite in cfg.suites:
            tasks += suite_tasks(suite, cfg.r_min, cfg.r_max, cfg.order, cfg.tolerance, cfg.terms)
    results = run_suite(tasks)
    failed = [res for res in results if not res.ok]
    for res in results:
        label = ", ".join(f"{k}={v}" for k, v in res.params.items() if v is not None)
        click.echo(f"[{'PASS' if res.ok else 'FAIL'}] {res.suite} {res.name} ({label}): {res.detail}")
    counts = {s: sum(1 for res in results if res.suite == s) for s in cfg.suites}
    summary = {"total": len(results), "passed": len(results) - len(failed), "failed": len(failed), "per_suite": counts}
    click.echo(f"{summary['passed']}/{summary['total']} checks passed")
    if cfg.output:
        payload = {"config": cfg.to_json(), "results": _canonical([res.to_json() for res in results]), "summary": summary}
        _write_json(cfg.output, payload)
    sys.exit(EXIT_FAIL if failed else EXIT_OK)


@main.command("eval")
@click.option("--builtin", "builtin", help="capparelli or FAMILY:r=R:j=J.")
@click.option("--spec", "spec_path", help="JSON Nahm spec file.")
@click.option("--order", type=int, default=20, show_default=True, help="Print every term with exponent <= N.")
@click.option("--include-c", is_flag=True, help="Multiply by the q^c prefactor.")
@click.option("--json", "json_path", help="Write the series as JSON here.")
def eval_cmd(builtin, spec_path, order, include_c, json_path) -> None:
    """Expand a Nahm sum exactly."""
    if (builtin is None) == (spec_path is None):
        _usage("give exactly one of --builtin or --spec")
    if order < 0:
        _usage(f"order must be non-negative, got {order}")
    try:
        if builtin is not None:
            spec = parse_builtin(builtin)
        else:
            try:
                data = json.loads(Path(spec_path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise DomainError(f"cannot read spec {spec_path}: {exc}") from exc
            spec = NahmSpec.from_json(data)
        full = eval_nahm(spec, order + 1, include_c=include_c)
    except DomainError as exc:
        _usage(str(exc))
    # inclusive: keep exponents <= order
    series = full.truncate(order + Fraction(1, full.D))
    click.echo(format_series(series, order_term=False))
    if json_path:
        _write_json(json_path, {"spec": spec.to_json(), "include_c": include_c, "series": series.to_json()})
    sys.exit(EXIT_OK)


@main.command("modularity")
@click.option("--theorem", default="all", show_default=True, help="4.1, 4.2, 4.3, 4.4 or all.")
@click.option("--r", "r_range", default="2..5", show_default=True, help="Rank range A..B.")
@click.option("--json", "json_path", help="Write the level reports as JSON here.")
def modularity_cmd(theorem, r_range, json_path) -> None:
    """Levels of the eta-quotients behind each modularity theorem."""
    theorems = modularity.THEOREMS if theorem == "all" else (theorem,)
    if any(t not in modularity.THEOREMS for t in theorems):
        _usage(f"unknown theorem {theorem!r}; expected one of {list(modularity.THEOREMS)} or all")
    try:
        r_min, r_max = parse_r_range(r_range)
        if not (R_BOUNDS[0] <= r_min <= r_max <= R_BOUNDS[1]):
            raise ConfigError(f"need {R_BOUNDS[0]} <= r_min <= r_max <= {R_BOUNDS[1]}, got {r_range}")
    except ConfigError as exc:
        _usage(str(exc))
    report = []
    ok = True
    for th in theorems:
        data = modularity.theorem_data(th)
        for r in range(r_min, r_max + 1):
            checks = modularity.level_checks(th, r)
            expected = data.level(r)
            good = all(c.ok for c in checks)
            ok &= good
            levels = sorted({c.level for c in checks})
            shown = levels[0] if len(levels) == 1 else levels
            click.echo(f"[{'PASS' if good else 'FAIL'}] theorem {th} r={r}: level {shown} (closed form {expected})")
            report.append({"theorem": th, "r": r, "ok": good, "level": expected, "quotients": [c.to_json() for c in checks]})
    if json_path:
        _write_json(json_path, {"results": report})
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


if __name__ == "__main__":
    main()
