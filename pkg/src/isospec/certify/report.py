"""Certificate assembly and JSON output."""
from __future__ import annotations

import datetime as _dt
import json
import math
import traceback
from dataclasses import dataclass, field
from pathlib import Path

from .. import __version__
from .checks import Context, build_checks
from .config import Config

STATUSES = ("pass", "fail", "skipped")
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 2, 3

CLAIM = (
    "isospectral: intertwining condition verified on the sampled weights and points; "
    "non-isometric: evidence only (trace obstructions differ and j is generic), not a proof"
)


def _finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class CheckResult:
    id: str
    status: str
    residual: float | None
    tolerance: float
    samples: int
    seed: int
    notes: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "pass" and not (self.residual is not None and self.residual <= self.tolerance):
            raise ValueError(f"check {self.id} marked pass with residual {self.residual} > {self.tolerance}")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "status": self.status,
            "residual": _finite_or_none(self.residual),
            "tolerance": float(self.tolerance),
            "samples": int(self.samples),
            "seed": int(self.seed),
            "notes": self.notes,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CheckResult":
        return cls(**obj)


@dataclass
class Certificate:
    version: str
    timestamp: str
    config: dict
    checks: list[CheckResult]
    verdict: dict
    heatprobe: dict | None = None

    def to_json(self) -> dict:
        out = {
            "version": self.version,
            "timestamp": self.timestamp,
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
            "verdict": self.verdict,
        }
        if self.heatprobe is not None:
            out["heatprobe"] = self.heatprobe
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        return cls(
            version=obj["version"],
            timestamp=obj["timestamp"],
            config=obj["config"],
            checks=[CheckResult.from_json(c) for c in obj["checks"]],
            verdict=obj["verdict"],
            heatprobe=obj.get("heatprobe"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, allow_nan=False) + "\n"

    def check(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)

    @property
    def passed(self) -> bool:
        return self.verdict["status"] == "pass"


def _verdict(results: list[CheckResult]) -> dict:
    failed = [c for c in results if c.status == "fail"]
    reasons = []
    for c in failed:
        if c.id == "pair.non_equivalent":
            reasons.append("pair not certified non-equivalent (trace obstructions agree)")
        elif c.id.startswith("family.generic."):
            reasons.append(f"{c.id}: j is not generic")
        else:
            reasons.append(f"{c.id}: {c.notes}")
    if failed:
        return {"status": "fail", "reasons": reasons}
    return {"status": "pass", "reasons": [], "claim": CLAIM}


def run_certification(config: Config, samples_out: list | None = None) -> Certificate:
    """Run every check for ``config``; errors inside a check become failures."""
    ctx = Context(config)
    results = []
    for chk in build_checks(config):
        if chk.group == "heat" and not config.heatprobe:
            results.append(CheckResult(chk.id, "skipped", None, chk.tolerance, 0, config.seed, "heat probe disabled"))
            continue
        try:
            out = chk.run(ctx)
        except Exception as exc:  # noqa: BLE001 - reported, never raised
            tb = traceback.extract_tb(exc.__traceback__)[-1]
            note = f"error: {type(exc).__name__}: {exc} (at {Path(tb.filename).name}:{tb.lineno})"
            results.append(CheckResult(chk.id, "fail", None, chk.tolerance, 0, config.seed, note))
            continue
        residual = float(out.residual)
        ok = math.isfinite(residual) and residual <= chk.tolerance
        results.append(
            CheckResult(chk.id, "pass" if ok else "fail", residual, chk.tolerance, out.samples, config.seed, out.notes)
        )
    heat = None
    if config.heatprobe and "runs" in ctx.heat:
        heat = {label: est.to_json() for label, (est, _) in ctx.heat["runs"].items()}
        if "fubini_study_scalar_curvature" in ctx.heat:
            heat["fubini_study_scalar_curvature"] = ctx.heat["fubini_study_scalar_curvature"]
        if samples_out is not None:
            samples_out.extend(ctx.heat["runs"]["t"][1])
    return Certificate(
        version=__version__,
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        config={**config.to_json(), "manifold": {"kind": "cpn", "n": config.n, "m": config.n - 1}},
        checks=results,
        verdict=_verdict(results),
        heatprobe=heat,
    )


def exit_code(cert: Certificate) -> int:
    return EXIT_PASS if cert.passed else EXIT_FAIL


def emit_report(cert: Certificate, path: str | Path | None) -> int:
    """Write the certificate as JSON (stdout when ``path`` is None); return the exit code."""
    text = cert.dumps()
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write certificate to {path}: {exc.strerror}") from None
    return exit_code(cert)


def parse_certificate(text: str) -> Certificate:
    return Certificate.from_json(json.loads(text))


def read_certificate(path: str | Path) -> Certificate:
    return parse_certificate(Path(path).read_text(encoding="utf-8"))
