"""Batch runner and report emitter for resolved scenarios.

One record per requested analysis, in request order.  Statuses: pass,
fail, skipped, hypotheses_not_met, budget_exceeded.  The JSON emitter is
byte-stable for a fixed scenario, seed and version: per-record wall times
are zeroed there by default and only shown in the text format.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .construct import SemidirectProduct
from .core import FiniteGroup, GroupError, GroupHom, Subgroup, closure
from .dsl import AInt, AList, ASet, ResolvedAnalysis, ResolvedScenario, ScenarioError
from .endo import (
    CheckRecord,
    EndoSemigroup,
    PreconditionPrimes,
    SearchBudgetExceeded,
    contraction,
    fewprimes_check,
    hom_search,
    shrinkind_check,
    tfrelstab_ii_check,
    verify_regulation,
    verify_splitthm,
    verify_theorem_a,
)
from .lattice import AutoSet, o_pi
from .tower import (
    CoherentEndoFamily,
    Tower,
    levelwise_contraction,
    typef_profile,
    verify_theorem_b_tower,
)


@dataclass(frozen=True)
class AnalysisRecord:
    kind: str
    target: str
    status: str
    details: dict
    ms: float


@dataclass(frozen=True)
class Report:
    scenario: str
    records: tuple[AnalysisRecord, ...]
    version: str
    seed: int

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.records)


@dataclass(frozen=True)
class RunConfig:
    jobs: int = 1
    seed: int = 0


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def _record_from_checks(kind: str, target: str, rec: CheckRecord, ms: float) -> AnalysisRecord:
    details = dict(rec.data)
    details["checks"] = {c.name: c.passed for c in rec.checks}
    failed = rec.failed()
    if failed:
        details["witness"] = failed[0].detail or failed[0].name
    return AnalysisRecord(kind, target, "pass" if rec.passed else "fail", _json_safe(details), ms)


def _is_tower_pair(obj) -> bool:
    return isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], Tower)


def _as_group(obj) -> FiniteGroup:
    if isinstance(obj, SemidirectProduct):
        return obj.group
    if isinstance(obj, FiniteGroup):
        return obj
    raise ScenarioError("NameUnresolved", f"expected a group, got {type(obj).__name__}")


def _as_endo(obj) -> GroupHom:
    if isinstance(obj, GroupHom):
        return obj
    raise ScenarioError("NameUnresolved", f"expected an endomorphism, got {type(obj).__name__}")


def _as_semigroup(obj, G: FiniteGroup) -> EndoSemigroup:
    if isinstance(obj, EndoSemigroup):
        return obj
    if isinstance(obj, GroupHom):
        return EndoSemigroup(G, [obj])
    raise ScenarioError("NameUnresolved", f"expected a semigroup, got {type(obj).__name__}")


def _as_tower(obj) -> tuple[Tower, CoherentEndoFamily]:
    if _is_tower_pair(obj):
        return obj
    raise ScenarioError("NameUnresolved", f"expected a tower, got {type(obj).__name__}")


def _as_subgroup(arg, G: FiniteGroup) -> Subgroup:
    if isinstance(arg, AList):
        elems = []
        for e in arg.elems:
            if not isinstance(e, int):
                raise ScenarioError("NameUnresolved", "subgroup literals use plain element indices")
            elems.append(e)
        return closure(G, elems)
    if isinstance(arg, Subgroup):
        return arg
    raise ScenarioError("NameUnresolved", "expected a subgroup literal [..]")


def _primes_of(arg) -> set[int]:
    if isinstance(arg, ASet):
        return {int(p) for p in arg.items}
    raise ScenarioError("NameUnresolved", "expected a prime set {p, ...}")


def _levels_label(base: str, k: int) -> str:
    return f"{base}[level {k + 1}]"


def _run_single(analysis: ResolvedAnalysis) -> list[AnalysisRecord]:
    kind, args, target = analysis.kind, analysis.args, analysis.target
    t0 = time.perf_counter()

    def ms() -> float:
        return (time.perf_counter() - t0) * 1000.0

    try:
        if kind == "contraction":
            if _is_tower_pair(args[0]):
                tower, fam = _as_tower(args[0])
                out = []
                for k, f in enumerate(fam.endos):
                    rep = contraction(f)
                    out.append(
                        AnalysisRecord(
                            kind,
                            _levels_label(target, k),
                            "pass" if all(rep.checks.values()) else "fail",
                            _json_safe(
                                {
                                    "con_order": rep.con.size,
                                    "stable_order": rep.stable_image.size,
                                    "depth": rep.depth,
                                    "oracle": rep.checks,
                                }
                            ),
                            ms(),
                        )
                    )
                return out
            G = _as_group(args[0])
            f = _as_endo(args[1])
            rep = contraction(f)
            return [
                AnalysisRecord(
                    kind,
                    target,
                    "pass" if all(rep.checks.values()) else "fail",
                    _json_safe(
                        {
                            "con_order": rep.con.size,
                            "stable_order": rep.stable_image.size,
                            "depth": rep.depth,
                            "kernel_chain": [s.size for s in rep.kernel_chain],
                            "image_chain": [s.size for s in rep.image_chain],
                            "oracle": rep.checks,
                        }
                    ),
                    ms(),
                )
            ]

        if kind == "theorem_a":
            if _is_tower_pair(args[0]):
                tower, fam = _as_tower(args[0])
                report = levelwise_contraction(tower, fam)
                out = []
                for k, rec in enumerate(report.theorem_a):
                    details = dict(rec.data)
                    details["checks"] = {c.name: c.passed for c in rec.checks}
                    if k > 0:
                        details["coherence_to_previous"] = vars(report.coherence[k - 1])
                    if tower.parts is not None:
                        sd = tower.parts[k]
                        details["con_matches_normal_part"] = report.level_reports[k].con == sd.normal_part
                        details["stable_matches_acting_part"] = (
                            report.level_reports[k].stable_image == sd.acting_part
                        )
                    out.append(
                        AnalysisRecord(
                            kind,
                            _levels_label(target, k),
                            "pass" if rec.passed else "fail",
                            _json_safe(details),
                            ms(),
                        )
                    )
                return out
            G = _as_group(args[0])
            f = _as_endo(args[1])
            return [_record_from_checks(kind, target, verify_theorem_a(G, f), ms())]

        if kind == "splitthm":
            G = _as_group(args[0])
            S = _as_semigroup(args[1], G)
            return [_record_from_checks(kind, target, verify_splitthm(G, S), ms())]

        if kind == "theorem_b":
            tower, fam = _as_tower(args[0])
            rep = verify_theorem_b_tower(tower, fam)
            details = {
                "diagnostics": {
                    "limit_injective": rep.diagnostics.limit_injective,
                    "verified_depth": rep.diagnostics.verified_depth,
                    "kernel_shrink_depth": rep.diagnostics.kernel_shrink_depth,
                    "projected_kernel_orders": rep.diagnostics.projected_kernel_orders,
                    "image_indices": rep.diagnostics.image_indices,
                    "image_open": rep.diagnostics.image_open,
                },
                "part_i_nilpotent": [r.nilpotent for r in rep.part_i],
                "o_lambda_orders": [r.subgroup.size for r in rep.part_i],
                "part_ii_applicable": rep.part_ii_applicable,
                "part_ii_passed": rep.part_ii_passed,
            }
            if rep.diagnostics.kernel_witness is not None:
                level, elem = rep.diagnostics.kernel_witness
                details["witness"] = f"kernel element {elem} survives projection to level {level}"
            return [AnalysisRecord(kind, target, rep.status, _json_safe(details), ms())]

        if kind == "regulation":
            G = _as_group(args[0])
            S = _as_semigroup(args[1], G)
            autos = _resolve_autoset(args[2], G)
            return [_record_from_checks(kind, target, verify_regulation(G, S, autos), ms())]

        if kind == "tfrelstab2":
            obj = args[0]
            if not isinstance(obj, SemidirectProduct):
                raise ScenarioError("NameUnresolved", "tfrelstab2 needs a semidirect-constructed group")
            S = _as_semigroup(args[1], obj.group)
            autos = _resolve_autoset(args[2], obj.group)
            return [_record_from_checks(kind, target, tfrelstab_ii_check(obj, S, autos), ms())]

        if kind == "shrinkind":
            G = _as_group(args[0])
            f = _as_endo(args[1])
            K = _as_subgroup(args[2], G)
            return [_record_from_checks(kind, target, shrinkind_check(G, f, K), ms())]

        if kind == "o_pi":
            G = _as_group(args[0])
            primes = _primes_of(args[1])
            sub = o_pi(G, primes)
            return [
                AnalysisRecord(
                    kind,
                    target,
                    "pass",
                    _json_safe({"order": sub.size, "index": sub.index, "members": sub.members[:32]}),
                    ms(),
                )
            ]

        if kind == "fewprimes":
            f = _as_endo(args[0])
            primes = _primes_of(args[1])
            return [_record_from_checks(kind, target, fewprimes_check(f, primes), ms())]

        if kind == "hom_search":
            G = _as_group(args[0])
            if isinstance(args[1], AList):
                tgt: FiniteGroup | Subgroup = _as_subgroup(args[1], G)
            else:
                obj = args[1]
                tgt = obj.group if isinstance(obj, SemidirectProduct) else obj
            res = hom_search(G, tgt)
            details = {"count": res.count, "witnesses_kept": len(res.witnesses)}
            if res.simple_witness is not None:
                details["simple_witness"] = {
                    "kernel_order": res.simple_witness.kernel.size,
                    "kernel_index": res.simple_witness.kernel.index,
                    "quotient_simple": res.simple_witness.quotient_simple,
                }
            return [AnalysisRecord(kind, target, "pass", _json_safe(details), ms())]

        if kind == "typef":
            tower, _fam = _as_tower(args[0])
            n = args[1].value if isinstance(args[1], AInt) else int(args[1])
            prof = typef_profile(tower, n)
            status = "pass" if prof.complete else "budget_exceeded"
            details = {
                "per_level": [p.counts for p in prof.per_level],
                "stabilized": prof.stabilized,
                "complete": prof.complete,
            }
            return [AnalysisRecord(kind, target, status, _json_safe(details), ms())]

        raise ScenarioError("NameUnresolved", f"unknown analysis kind {kind!r}")
    except PreconditionPrimes as exc:
        return [AnalysisRecord(kind, target, "skipped", {"reason": str(exc)}, ms())]
    except SearchBudgetExceeded as exc:
        return [AnalysisRecord(kind, target, "budget_exceeded", {"reason": str(exc)}, ms())]
    except GroupError as exc:
        return [AnalysisRecord(kind, target, "fail", {"error": str(exc)}, ms())]


def _resolve_autoset(arg, G: FiniteGroup) -> AutoSet | None:
    if isinstance(arg, ASet):
        if not arg.items:
            return None
        maps = []
        for item in arg.items:
            if not isinstance(item, GroupHom):
                raise ScenarioError("NameUnresolved", f"automorphism set items must name endomorphisms, got {item!r}")
            maps.append(item)
        return AutoSet(G, tuple(maps))
    if isinstance(arg, AutoSet):
        return arg
    raise ScenarioError("NameUnresolved", "expected an automorphism set {name, ...}")


def run(resolved: ResolvedScenario, config: RunConfig | None = None) -> Report:
    """Execute every analysis; records are aggregated in request order."""
    config = config or RunConfig()
    jobs = max(1, config.jobs)
    if jobs == 1:
        chunks = [_run_single(a) for a in resolved.analyses]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_single, a) for a in resolved.analyses]
            chunks = [f.result() for f in futures]
    records: list[AnalysisRecord] = []
    for chunk in chunks:
        records.extend(chunk)
    return Report(resolved.label, tuple(records), __version__, config.seed)


def emit(report: Report, format: str = "text", *, timings: bool | None = None) -> bytes:
    """Render a report.  JSON is byte-stable: times are zeroed unless asked."""
    if format == "json":
        include_ms = bool(timings)
        tree = {
            "scenario": report.scenario,
            "analyses": [
                {
                    "kind": r.kind,
                    "target": r.target,
                    "status": r.status,
                    "details": r.details,
                    "ms": round(r.ms, 3) if include_ms else 0,
                }
                for r in report.records
            ],
            "version": report.version,
            "seed": report.seed,
        }
        return (json.dumps(tree, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")
    if format != "text":
        raise ValueError(f"unknown format {format!r}")

    rows = [("#", "kind", "target", "status", "ms", "detail")]
    for i, r in enumerate(report.records):
        brief = []
        for key in ("con_order", "stable_order", "depth", "count", "order", "stabilized"):
            if key in r.details:
                brief.append(f"{key}={r.details[key]}")
        if "witness" in r.details:
            brief.append(f"witness: {r.details['witness']}")
        if "reason" in r.details:
            brief.append(str(r.details["reason"]))
        if "error" in r.details:
            brief.append(str(r.details["error"]))
        rows.append((str(i), r.kind, r.target, r.status.upper(), f"{r.ms:.1f}", "; ".join(brief)))
    widths = [max(len(row[c]) for row in rows) for c in range(5)]
    lines = [f"scenario: {report.scenario}   version: {report.version}   seed: {report.seed}"]
    for row in rows:
        lines.append("  ".join(row[c].ljust(widths[c]) for c in range(5)) + "  " + row[5])
    lines.append("result: " + ("OK" if report.ok else "FAILURES PRESENT"))
    return ("\n".join(lines) + "\n").encode("utf-8")
