"""Command line front door: ``unitspec {gl1,hocolim,suite}``.

Reports are JSON with sorted keys and no timing information, so the same
configuration and seed always produce byte-identical files.  Wall-clock
time is only printed in the human-readable summary.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ConfigError, UnitspecError

SCHEMA_VERSION = 1
ENV_PREFIX = "UNITSPEC_"


@dataclass
class JobConfig:
    command: str
    ring: str | None = None
    diagram: str | None = None
    N: int = 3
    D: int = 4
    n_max: int = 3
    k_max: int = 1
    seed: int = 0
    out: str | None = None
    checks: list[str] = field(default_factory=lambda: ["core", "box"])
    count: int = 20
    negative_control: bool = False

    def validate(self) -> None:
        if self.k_max > self.D - 2:
            raise ConfigError(f"k_max = {self.k_max} must be at most D - 2 = {self.D - 2}", {"k_max": self.k_max, "D": self.D})
        if min(self.N, self.D, self.n_max, self.k_max) < 0 or self.N < 1 or self.D < 2:
            raise ConfigError("need N >= 1, D >= 2 and nonnegative n_max, k_max")

    def echo(self) -> dict[str, Any]:
        out = asdict(self)
        out.pop("out")
        return out


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.exc = exc


def _stage(name: str, fn: Callable[[], Any]) -> Any:
    try:
        return fn()
    except UnitspecError as exc:
        raise StageError(name, exc) from exc


def _provenance(cfg: JobConfig) -> dict[str, Any]:
    return {"N": cfg.N, "D": cfg.D, "k_max": cfg.k_max, "n_max": cfg.n_max, "valid_through": cfg.D - 2}


def _groups(gs) -> list[str]:
    return [str(g) for g in gs]


# --------------------------------------------------------------------------
# diagram descriptions


def space_from_spec(spec: Any):
    """Finite simplicial set from a short JSON description."""
    from .sset import FinSSet

    if spec in (None, "point"):
        return FinSSet.point()
    if isinstance(spec, dict):
        if "discrete" in spec:
            return FinSSet.discrete(int(spec["discrete"]))
        if "sphere" in spec:
            n = int(spec["sphere"])
            return FinSSet.from_complex([tuple(v for v in range(n + 2) if v != j) for j in range(n + 2)])
        if "complex" in spec:
            return FinSSet.from_complex(spec["complex"])
        if "simplices" in spec:
            return FinSSet.from_json(spec)
    raise ConfigError(f"cannot parse space description {spec!r}")


def diagram_from_spec(spec: dict[str, Any], N: int | None = None):
    """I-space from a JSON description; ``N`` overrides the file's value."""
    from .ispace import ISpace, coproduct, orbit_ispace

    kind = spec.get("kind")
    N = int(spec.get("N", 3)) if N is None else N
    if kind == "terminal":
        return ISpace.terminal(N)
    if kind == "constant":
        return ISpace.constant(N, space_from_spec(spec.get("space")), name=spec.get("name", "const"))
    if kind in ("free", "orbit"):
        H = [tuple(h) for h in spec.get("subgroup", [])] if kind == "orbit" else []
        return orbit_ispace(N, int(spec["d"]), H, space_from_spec(spec.get("space")), name=spec.get("name", ""))
    if kind == "coproduct":
        parts = [diagram_from_spec(p, N) for p in spec["parts"]]
        out = parts[0]
        for p in parts[1:]:
            out = coproduct(out, p)
        return out
    raise ConfigError(f"unknown diagram kind {kind!r}")


def corpus_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("unitspec.corpus").iterdir() if p.name.endswith(".json"))


def load_diagram_spec(ref: str) -> dict[str, Any]:
    """A file path, or ``builtin:NAME`` for the shipped corpus."""
    if ref.startswith("builtin:"):
        name = ref.split(":", 1)[1]
        if name not in corpus_names():
            raise ConfigError(f"no built-in diagram {name!r}; have {corpus_names()}")
        text = resources.files("unitspec.corpus").joinpath(name + ".json").read_text()
    else:
        path = Path(ref)
        if not path.exists():
            raise ConfigError(f"diagram file {ref} not found")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"diagram file {ref} is not valid JSON: {exc}") from exc


# --------------------------------------------------------------------------
# pipelines


def run_gl1(cfg: JobConfig) -> dict[str, Any]:
    from .dkspec import em_spectrum, omega_bullet
    from .gammaunits import gamma_construct, gl1_bullet, group_completion_pi0, group_nerve_h1, pi0_monoid, segal_check, segal_machine_delooping
    from .rings import parse_ring
    from .sset import homology

    if not cfg.ring:
        raise ConfigError("gl1 needs --ring")
    R = _stage("ring", lambda: parse_ring(cfg.ring))
    E = _stage("spectrum", lambda: em_spectrum(R, cfg.N))
    M = _stage("pi0_monoid", lambda: pi0_monoid(omega_bullet(E)))
    U = _stage("units", lambda: gl1_bullet(E))
    Mu = U.meta["pi0_monoid"]
    units = Mu.group_invariants()
    H = _stage("gamma", lambda: gamma_construct(U, cfg.n_max, cfg.N, cfg.D, cfg.k_max))
    functor = _stage("functoriality", H.check_functoriality)
    ordering = _stage("ordering", H.check_ordering_independence)
    segal = _stage("segal", lambda: segal_check(H, cfg.k_max))
    completion = _stage("completion", lambda: group_completion_pi0(H))
    report: dict[str, Any] = {}
    deloop_ok = None
    if cfg.n_max >= cfg.k_max + 1:
        B = _stage("delooping", lambda: segal_machine_delooping(H, cfg.k_max))
        deloop = homology(B, cfg.k_max).groups
        oracle = group_nerve_h1(Mu, cfg.k_max)
        deloop_ok = deloop == oracle
        report["delooping"] = {"homology": _groups(deloop), "oracle_group_nerve": _groups(oracle), "match": deloop_ok, "simplices": list(B.counts)}
    else:
        report["delooping"] = {"skipped": f"needs n_max >= {cfg.k_max + 1}"}
    brute = R.unit_group()
    verdicts = {
        "units_match_brute_force": units == brute,
        "units_match_completion": completion.invariants == units,
        "segal": all(v.passed for v in segal),
        "completion_grouplike": completion.grouplike,
    }
    if deloop_ok is not None:
        verdicts["delooping_matches_oracle"] = deloop_ok
    report.update(
        {
            "ring": R.to_json(),
            "pi0_monoid": M.to_json(),
            "units": {"monoid": Mu.to_json(), "group": str(units), "brute_force": str(brute)},
            "gamma": {**H.to_json(cfg.k_max), "functoriality": functor, "ordering_checks": ordering},
            "segal": [v.to_json() for v in segal],
            "completion": completion.to_json(),
            "verdicts": verdicts,
        }
    )
    return report


def run_hocolim(cfg: JobConfig) -> dict[str, Any]:
    from .barcat import colimit_pi0, hocolim
    from .dkspec import em_spectrum, omega_bullet, spectrum_homotopy
    from .errors import NotStabilized
    from .rings import parse_ring
    from .sset import homology

    report: dict[str, Any] = {}
    verdicts: dict[str, bool] = {}
    if cfg.diagram:
        spec = load_diagram_spec(cfg.diagram)
        X = _stage("diagram", lambda: diagram_from_spec(spec, cfg.N))
        report["diagram"] = {"description": spec}
        expect = spec.get("expect")
    elif cfg.ring:
        R = _stage("ring", lambda: parse_ring(cfg.ring))
        E = _stage("spectrum", lambda: em_spectrum(R, cfg.N))
        X = _stage("omega", lambda: omega_bullet(E)).owner
        sh = None
        try:
            sh = spectrum_homotopy(E, cfg.k_max)
            report["spectrum_homotopy"] = sh.to_json()
        except NotStabilized as exc:
            report["spectrum_homotopy"] = {"not_stabilized": str(exc)}
        report["ring"] = R.to_json()
        expect = None
    else:
        raise ConfigError("hocolim needs --diagram or --ring")
    hc = _stage("hocolim", lambda: hocolim(X.base, X, cfg.D, cfg.k_max + 1))
    groups = homology(hc.sset, cfg.k_max).groups
    colim, _ = colimit_pi0(X)
    report["hocolim"] = {"homology": _groups(groups), "pi0_colimit": colim, "simplices": list(hc.sset.counts), "provenance": hc.provenance}
    verdicts["pi0_matches_colimit"] = groups[0].rank == colim
    if expect is not None:
        want = expect.get("homology", [])[: cfg.k_max + 1]
        verdicts["matches_expected"] = _groups(groups)[: len(want)] == want
    report["verdicts"] = verdicts
    return report


# --------------------------------------------------------------------------
# property suite


def _suite_core(cfg: JobConfig, rng: np.random.Generator) -> dict[str, Any]:
    from .barcat import CoDiagramF, DiagramF, FinCat, bar, lemmaA2_check, nerve
    from .ispace import inj_cat
    from .sset import homology

    out: dict[str, Any] = {}
    I2 = inj_cat(2)
    I2.check_laws()
    for name, C in (("I<=2", I2), ("Z/3", FinCat.cyclic_group(3)), ("terminal", FinCat.terminal())):
        b = nerve(C, cfg.D)
        b.sset.check_identities()
        out[f"nerve[{name}]"] = {"ok": True, "simplices": list(b.sset.counts), "homology": _groups(homology(b.sset, cfg.D - 2).groups)}
    Y = CoDiagramF.represented(I2, 1)
    X = DiagramF.represented(I2, 1)
    b = bar(Y, I2, X, cfg.D)
    b.sset.check_identities()
    out["bar[I2(-,1),I2,I2(1,-)]"] = {"ok": True, "simplices": list(b.sset.counts)}
    rep = lemmaA2_check(None, I2, X, 3)
    out["lemmaA2[I<=2]"] = {"ok": True, **rep.to_json()}
    # negative control: a broken composite must be caught with a witness
    C = FinCat.cyclic_group(3).with_corrupted_composite(1, 1, 0)
    try:
        nerve(C, 3).sset.check_identities()
        out["negative_control"] = {"ok": False, "witness": "corrupted composition went unnoticed"}
    except UnitspecError as exc:
        out["negative_control"] = {"ok": True, "caught": type(exc).__name__, "message": str(exc)}
    return out


def _suite_box(cfg: JobConfig, rng: np.random.Generator) -> dict[str, Any]:
    from .ispace import compare_box_with_oracle, free_box_identity, random_ispace

    out: dict[str, Any] = {}
    N = min(cfg.N, 4)
    for i in range(cfg.count):
        X, Y = random_ispace(rng, N), random_ispace(rng, N)
        r = compare_box_with_oracle(X, Y)
        out[f"box_vs_oracle[{i}]"] = {"ok": r.ok, "pair": [X.name, Y.name], "sizes": r.levels, "witness": r.witness}
    for m in range(N + 1):
        for n in range(N + 1 - m):
            r = free_box_identity(m, n, N)
            out[f"free_box[{m},{n}]"] = {"ok": r.ok, "witness": r.witness}
    return out


def _suite_rings(cfg: JobConfig, rng: np.random.Generator) -> dict[str, Any]:
    from .dkspec import adjunction_audit, check_ring_spectrum, em_spectrum, omega_bullet
    from .ispace import ISpace, free_ispace
    from .rings import CORPUS, parse_ring
    from .sset import FinSSet

    out: dict[str, Any] = {}
    for name in [cfg.ring] if cfg.ring else CORPUS:
        R = parse_ring(name)
        R.check_axioms()
        E = em_spectrum(R, cfg.N)
        laws = check_ring_spectrum(E)
        out[f"ring_spectrum[{name}]"] = {"ok": True, **laws.to_json()}
        S = omega_bullet(E)
        out[f"omega_fcp[{name}]"] = {"ok": True, "checks": S.meta["fcp_checks"]}
        small = em_spectrum(R, 2)
        for label, X in (("*", ISpace.terminal(2)), ("F_1(*)", free_ispace(1, FinSSet.point(), 2))):
            a = adjunction_audit(X, small, label)
            out[f"adjunction[{name},{label}]"] = {"ok": a.ok, **a.to_json()}
    return out


SUITES: dict[str, Callable[[JobConfig, np.random.Generator], dict[str, Any]]] = {
    "core": _suite_core,
    "box": _suite_box,
    "rings": _suite_rings,
}


def run_suite(cfg: JobConfig) -> dict[str, Any]:
    rng = np.random.default_rng(cfg.seed)
    results: dict[str, Any] = {}
    for name in cfg.checks:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; have {sorted(SUITES)}")
        try:
            results[name] = SUITES[name](cfg, rng)
        except UnitspecError as exc:
            results[name] = {"error": {"ok": False, "type": type(exc).__name__, "message": str(exc), "witness": _jsonable(exc.witness)}}
    if cfg.negative_control:
        from .barcat import FinCat, nerve

        C = FinCat.cyclic_group(3).with_corrupted_composite(1, 1, 0)
        try:
            nerve(C, 3).sset.check_identities()
            results["injected_fault"] = {"corrupted": {"ok": True}}
        except UnitspecError as exc:
            results["injected_fault"] = {"corrupted": {"ok": False, "type": type(exc).__name__, "message": str(exc)}}
    verdicts = {f"{s}/{k}": bool(v.get("ok")) for s, block in results.items() for k, v in block.items()}
    return {"results": results, "verdicts": verdicts}


# --------------------------------------------------------------------------
# entry point


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj
    return str(obj)


def dump_report(report: dict[str, Any]) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    env = os.environ
    common.add_argument("--ring", default=env.get(ENV_PREFIX + "RING"), help="ring spec such as Z/6, F5, F2[x]/x^2")
    common.add_argument("--diagram", default=env.get(ENV_PREFIX + "DIAGRAM"), metavar="FILE", help="diagram JSON file or builtin:NAME")
    common.add_argument("-N", type=int, default=int(env.get(ENV_PREFIX + "N", 3)), help="top level of the injection category")
    common.add_argument("-D", type=int, default=int(env.get(ENV_PREFIX + "D", 4)), help="bar truncation; homology valid for k <= D - 2")
    common.add_argument("--nmax", type=int, default=int(env.get(ENV_PREFIX + "NMAX", 3)), help="largest n+ of the Gamma-space")
    common.add_argument("--kmax", type=int, default=int(env.get(ENV_PREFIX + "KMAX", 1)), help="top homological degree reported")
    common.add_argument("--seed", type=int, default=int(env.get(ENV_PREFIX + "SEED", 0)))
    common.add_argument("--out", default=env.get(ENV_PREFIX + "OUT"), metavar="FILE", help="write the full JSON report here")
    p = argparse.ArgumentParser(prog="unitspec", description="Units of desk-scale ring spectra and their Gamma-spaces.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gl1", parents=[common], help="HR -> Omega -> GL_1 -> Gamma-space -> gl_1 report")
    sub.add_parser("hocolim", parents=[common], help="homology of hocolim over I<=N of a diagram or of Omega HR")
    s = sub.add_parser("suite", parents=[common], help="run property suites")
    s.add_argument("--checks", default=env.get(ENV_PREFIX + "CHECKS", "core,box"), help=f"comma separated, from {sorted(SUITES)}")
    s.add_argument("--count", type=int, default=int(env.get(ENV_PREFIX + "COUNT", 20)), help="random diagram pairs for the box suite")
    s.add_argument("--negative-control", action="store_true", help="also run a deliberately corrupted category as a positive check")
    return p


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    cfg = JobConfig(
        command=ns.command,
        ring=ns.ring,
        diagram=ns.diagram,
        N=ns.N,
        D=ns.D,
        n_max=ns.nmax,
        k_max=ns.kmax,
        seed=ns.seed,
        out=ns.out,
    )
    if ns.command == "suite":
        cfg.checks = [c for c in ns.checks.split(",") if c]
        cfg.count = ns.count
        cfg.negative_control = ns.negative_control
    cfg.validate()
    return cfg


RUNNERS = {"gl1": run_gl1, "hocolim": run_hocolim, "suite": run_suite}


def execute(cfg: JobConfig) -> tuple[int, dict[str, Any]]:
    """Run a job; returns (exit code, report)."""
    base = {"schema_version": SCHEMA_VERSION, "job": cfg.echo(), "provenance": _provenance(cfg)}
    try:
        body = RUNNERS[cfg.command](cfg)
    except StageError as err:
        code = 2 if isinstance(err.exc, ConfigError) else 1
        return code, {**base, "status": "error", "stage": err.stage, "error": {"type": type(err.exc).__name__, "message": str(err.exc), "witness": err.exc.witness}}
    except ConfigError as exc:
        return 2, {**base, "status": "error", "stage": "config", "error": {"type": type(exc).__name__, "message": str(exc), "witness": exc.witness}}
    except UnitspecError as exc:
        return 1, {**base, "status": "error", "stage": cfg.command, "error": {"type": type(exc).__name__, "message": str(exc), "witness": exc.witness}}
    passed = all(body.get("verdicts", {}).values())
    return (0 if passed else 1), {**base, **body, "status": "pass" if passed else "fail"}


def _summary(report: dict[str, Any]) -> list[str]:
    lines = [f"{report['job']['command']}: {report['status']}"]
    if report["status"] == "error":
        err = report["error"]
        lines.append(f"  stage {report['stage']}: {err['type']}: {err['message']}")
        return lines
    if "units" in report:
        lines.append(f"  units {report['units']['group']} (brute force {report['units']['brute_force']})")
        lines.append(f"  group completion {report['completion']['group']}, grouplike {report['completion']['grouplike']}")
        d = report["delooping"]
        if "homology" in d:
            lines.append(f"  delooping H_* {d['homology']} (group nerve {d['oracle_group_nerve']})")
    if "hocolim" in report:
        lines.append(f"  hocolim H_* {report['hocolim']['homology']}, colim pi0 has {report['hocolim']['pi0_colimit']} elements")
    failed = [k for k, v in report.get("verdicts", {}).items() if not v]
    lines.append(f"  {len(report.get('verdicts', {})) - len(failed)} checks passed, {len(failed)} failed")
    lines.extend(f"  FAILED {k}" for k in failed)
    return lines


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = config_from_args(ns)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    code, report = execute(cfg)
    text = dump_report(report)
    if cfg.out:
        Path(cfg.out).write_text(text)
    for line in _summary(report):
        print(line)
    print(f"  ({time.perf_counter() - t0:.1f}s, exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
