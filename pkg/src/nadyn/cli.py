"""Command-line front end.

Exit status: 0 on success, 1 when a verification fails (witnesses go to
stderr), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .arith import format_rational
from .errors import NeedsMoreDepth, ResourceError, VerificationError
from .measure import (BernoulliMeasure, CountingMeasure, load_measure,
                      verify_measure_axioms)
from .report import Report
from .setexpr import parse_set_expr, parse_set_list
from .shift import PointWord, format_word

MAX_DEPTH = 14
MAX_CELLS = 5_000_000
MAX_PATHOLOGY_N = 1000
DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, report: Report):
        super().__init__(report.title)
        self.report = report


@dataclass
class RunConfig:
    command: str
    action: str | None = None
    spec: str | None = None
    spec2: str | None = None
    set_expr: str | None = None
    point: str | None = None
    depth: int = 6
    n: int = 6
    d: int = 4
    partition: str | None = None
    cover: str | None = None
    transform: str = "shift"
    t_from: str = "shift"
    s_to: str = "shift"
    perm: str | None = None
    iso: str | None = None
    fn: str | None = None
    w: str | None = None
    p: int | None = None
    digits: str | None = None
    fmt: str = "csv"
    out: str | None = None
    summary: str | None = None
    seed: int = DEFAULT_SEED
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.depth <= MAX_DEPTH:
            raise UsageError(f"--depth must be in [0, {MAX_DEPTH}]")
        n_max = MAX_PATHOLOGY_N if self.command == "pathology" else MAX_DEPTH
        if not 1 <= self.n <= n_max:
            raise UsageError(f"--n must be in [1, {n_max}]")
        if self.fmt not in ("csv", "json"):
            raise UsageError("--format must be csv or json")


def _load_json(path: str | None, what: str):
    if not path:
        raise UsageError(f"missing {what}")
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {what} {path!r}: {exc}") from exc


def _measure(cfg: RunConfig, which: str = "spec"):
    return load_measure(_load_json(getattr(cfg, which), f"--{which}"))


def _require(value, flag):
    if value is None:
        raise UsageError(f"missing {flag}")
    return value


def _set_for(m, text: str):
    if isinstance(m, CountingMeasure):
        return frozenset(t.strip() for t in text.split(",") if t.strip())
    return parse_set_expr(text, m.p)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _emit_report(rep: Report, out) -> None:
    out.write("\n".join(rep.lines()) + "\n")
    if not rep.ok:
        raise CheckFailed(rep)


def cmd_measure(cfg: RunConfig, out) -> None:
    m = _measure(cfg)
    if cfg.action == "eval":
        out.write(format_rational(m.measure(_set_for(m, _require(cfg.set_expr, "--set")))) + "\n")
    elif cfg.action == "norm":
        out.write(_dumps(m.norm(_set_for(m, _require(cfg.set_expr, "--set"))).to_json()) + "\n")
    elif cfg.action == "nmu":
        text = _require(cfg.point, "--point")
        x = text if isinstance(m, CountingMeasure) else PointWord.parse(text, m.p)
        out.write(_dumps(m.point_norm(x).to_json()) + "\n")
    elif cfg.action == "verify":
        out.write(f"seed {cfg.seed}\n")
        _emit_report(verify_measure_axioms(m, cfg.depth, seed=cfg.seed), out)
    else:
        raise UsageError(f"unknown measure action {cfg.action!r}")


def _step_function(cfg: RunConfig, p: int):
    from .integrate import StepFunction
    return StepFunction.from_json(_load_json(cfg.fn, "--fn"), p)


def cmd_integrate(cfg: RunConfig, out) -> None:
    from .integrate import integrate
    m = _measure(cfg)
    out.write(format_rational(integrate(m, _step_function(cfg, m.p))) + "\n")


def cmd_stepnorm(cfg: RunConfig, out) -> None:
    from .integrate import step_norm
    m = _measure(cfg)
    out.write(_dumps(step_norm(m, _step_function(cfg, m.p)).to_json()) + "\n")


def cmd_spectral(cfg: RunConfig, out) -> None:
    from .integrate import LinearOnSteps, check_spectral_conditions
    mu = _measure(cfg)
    nu = _measure(cfg, "spec2") if cfg.spec2 else mu
    w = LinearOnSteps.from_json(_load_json(cfg.w, "--W"))
    rep, phi = check_spectral_conditions(mu, nu, w)
    out.write("\n".join(rep.lines()) + "\n")
    if phi is not None:
        out.write(_dumps({"extracted_iso": phi.to_json()}) + "\n")
    if not rep.ok:
        raise CheckFailed(rep)


def _iso(cfg: RunConfig, p: int, depth: int):
    from .transform import MeasureAlgebraIso, iso_from_permutation
    if cfg.iso:
        return MeasureAlgebraIso.from_json(_load_json(cfg.iso, "--iso"))
    if cfg.perm:
        pi = [int(t) for t in cfg.perm.split(",")]
        if len(pi) != p:
            raise UsageError(f"--perm must list {p} symbols")
        return iso_from_permutation(pi, depth)
    raise UsageError("give --iso FILE or --perm LIST")


def _alphabet(cfg: RunConfig) -> int:
    if cfg.p is not None:
        return cfg.p
    if cfg.spec:
        m = _measure(cfg)
        if isinstance(m, BernoulliMeasure):
            return m.p
    raise UsageError("missing --p")


def _transform(text: str, p: int):
    from .transform import load_transformation
    path = Path(text)
    if text.endswith(".json") and path.exists():
        return load_transformation(json.loads(path.read_text()), p)
    return load_transformation(text, p)


def cmd_dynamics(cfg: RunConfig, out) -> None:
    from .transform import (check_conjugacy, check_iso_of_systems,
                            check_measure_preserving, point_map_from_iso)
    if cfg.action == "check-preserving":
        m = _measure(cfg)
        _emit_report(check_measure_preserving(m, _transform(cfg.transform, m.p), cfg.depth,
                                              seed=cfg.seed), out)
    elif cfg.action == "check-conjugacy":
        p = _alphabet(cfg)
        phi = _iso(cfg, p, cfg.depth + 1)
        _emit_report(check_conjugacy(phi, _transform(cfg.t_from, p), _transform(cfg.s_to, p),
                                     cfg.depth), out)
    elif cfg.action == "point-map":
        p = _alphabet(cfg)
        m = _measure(cfg) if cfg.spec else None
        phi = _iso(cfg, p, max(cfg.d, cfg.depth))
        x = PointWord.parse(_require(cfg.point, "--point"), p)
        out.write(format_word(point_map_from_iso(phi, x, cfg.d, m)) + "\n")
    elif cfg.action == "check-iso":
        mu = _measure(cfg)
        nu = _measure(cfg, "spec2") if cfg.spec2 else mu
        pi = [int(t) for t in _require(cfg.perm, "--perm").split(",")]
        _emit_report(check_iso_of_systems(pi, _transform(cfg.t_from, mu.p),
                                          _transform(cfg.s_to, nu.p), mu, nu, cfg.depth), out)
    else:
        raise UsageError(f"unknown dynamics action {cfg.action!r}")


def _partition(text: str, p: int):
    from .entropy import Partition
    return Partition(parse_set_list(text, p))


def _write_sequence(cfg: RunConfig, seq, out, extra: dict | None = None) -> dict:
    from .entropy import fekete_estimate
    est = fekete_estimate(seq)
    summary = est.to_json()
    if extra:
        summary.update(extra)
    rows = seq.rows()
    if cfg.fmt == "json":
        out.write(_dumps({"rows": rows, "summary": summary}) + "\n")
        return summary
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["n", "e_n", "M_n", "a_n_decimal", "ratio"],
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    out.write(buf.getvalue())
    text = _dumps(summary) + "\n"
    if cfg.summary:
        Path(cfg.summary).write_text(text)
    else:
        sys.stderr.write(text)
    return summary


def cmd_entropy(cfg: RunConfig, out) -> None:
    from .entropy import (Cover, compare_entropies, measure_entropy_sequence,
                          topological_entropy_sequence)
    if cfg.action == "measure":
        m = _measure(cfg)
        alpha = _partition(_require(cfg.partition, "--partition"), m.p)
        seq = measure_entropy_sequence(m, _transform(cfg.transform, m.p), alpha, cfg.n)
        _write_sequence(cfg, seq, out)
    elif cfg.action == "top":
        p = _alphabet(cfg)
        cover = Cover(parse_set_list(_require(cfg.cover, "--cover"), p))
        seq = topological_entropy_sequence(_transform(cfg.transform, p), cover, cfg.n)
        _write_sequence(cfg, seq, out)
    elif cfg.action == "compare":
        m = _measure(cfg)
        alpha = _partition(_require(cfg.partition, "--partition"), m.p)
        rep, a, b = compare_entropies(m, _transform(cfg.transform, m.p), alpha, cfg.n)
        if cfg.fmt == "json":
            out.write(_dumps({"measure": a.rows(), "topological": b.rows(),
                              "ok": rep.ok}) + "\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["n", "e_n", "M_n", "a_n_decimal", "N_n", "b_n_decimal"])
            for ra, rb in zip(a.rows(), b.rows()):
                writer.writerow([ra["n"], ra["e_n"], ra["M_n"], ra["a_n_decimal"],
                                 rb["M_n"], rb["a_n_decimal"]])
        sys.stderr.write("\n".join(rep.lines()) + "\n")
        if not rep.ok:
            raise CheckFailed(rep)
    else:
        raise UsageError(f"unknown entropy action {cfg.action!r}")


def cmd_pathology(cfg: RunConfig, out) -> None:
    from .pathology import DigitStream, decay_sequence
    if cfg.action != "upsilon":
        raise UsageError("only 'pathology upsilon' is available")
    p = _require(cfg.p, "--p")
    x = DigitStream.parse(_require(cfg.digits, "--digits"), p)
    table = decay_sequence(x, cfg.n)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "k_n", "abs"])
    for r in table.rows:
        writer.writerow([r.n, r.k_n, str(r.norm)])
    for n, why in table.skipped:
        sys.stderr.write(f"skipped n={n}: {why}\n")
    out.write(f"continuity violated: {'yes' if table.continuity_violated() else 'no'}\n")


def cmd_selftest(cfg: RunConfig, out) -> None:
    from .acceptance import CRITERIA
    failed = []
    for fn in CRITERIA:
        rep = fn()
        out.write("\n".join(rep.lines()) + "\n")
        if not rep.ok:
            failed.append(rep)
    if failed:
        raise CheckFailed(Report("selftest", [c for r in failed for c in r.failures()]))


COMMANDS = {
    "measure": cmd_measure,
    "integrate": cmd_integrate,
    "stepnorm": cmd_stepnorm,
    "spectral-check": cmd_spectral,
    "dynamics": cmd_dynamics,
    "entropy": cmd_entropy,
    "pathology": cmd_pathology,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nadyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--spec", help="measure JSON file")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--depth", type=int, default=6)
        sp.add_argument("--p", type=int)
        sp.add_argument("--format", dest="fmt", default="csv", choices=("csv", "json"))

    sp = sub.add_parser("measure")
    sp.add_argument("action", choices=("eval", "norm", "nmu", "verify"))
    common(sp)
    sp.add_argument("--set", dest="set_expr")
    sp.add_argument("--point", help="PRE:PER (or a label for counting measures)")

    for name in ("integrate", "stepnorm"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--fn", required=True, help="step-function JSON file")

    sp = sub.add_parser("spectral-check")
    common(sp)
    sp.add_argument("--spec2", help="target measure (default: same as --spec)")
    sp.add_argument("--W", dest="w", required=True, help="linear map JSON file")

    sp = sub.add_parser("dynamics")
    sp.add_argument("action", choices=("check-preserving", "check-conjugacy", "point-map", "check-iso"))
    common(sp)
    sp.add_argument("--spec2")
    sp.add_argument("--transform", default="shift")
    sp.add_argument("--T", dest="t_from", default="shift")
    sp.add_argument("--S", dest="s_to", default="shift")
    sp.add_argument("--perm", help="comma-separated symbol permutation")
    sp.add_argument("--iso", help="measure algebra isomorphism JSON file")
    sp.add_argument("--point")
    sp.add_argument("--d", type=int, default=4)

    sp = sub.add_parser("entropy")
    sp.add_argument("action", choices=("measure", "top", "compare"))
    common(sp)
    sp.add_argument("--partition", help="'|'-separated set expressions")
    sp.add_argument("--cover", help="'|'-separated set expressions")
    sp.add_argument("--transform", default="shift")
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--summary", help="write the JSON summary here (default: stderr)")

    sp = sub.add_parser("pathology")
    sp.add_argument("action", choices=("upsilon",))
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--digits", required=True, help="PREFIX,period=DIGITS")
    sp.add_argument("--n", type=int, default=30)
    sp.add_argument("--out")

    sp = sub.add_parser("selftest")
    sp.add_argument("--out")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    kwargs = {k: v for k, v in vars(ns).items() if k in fields and v is not None}
    return RunConfig(**kwargs)


def run(cfg: RunConfig, out=None) -> int:
    close = False
    if out is None:
        if cfg.out:
            out = open(cfg.out, "w", newline="")
            close = True
        else:
            out = sys.stdout
    try:
        COMMANDS[cfg.command](cfg, out)
        return 0
    except CheckFailed as exc:
        for c in exc.report.failures():
            sys.stderr.write(f"verification failed: {c.name}; witness: {c.witness!r}\n")
        return 1
    except (VerificationError, ResourceError, NeedsMoreDepth) as exc:
        sys.stderr.write(f"error: {exc}\n")
        if getattr(exc, "witness", None) is not None:
            sys.stderr.write(f"witness: {exc.witness!r}\n")
        return 1
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    finally:
        if close:
            out.close()


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        parser.error(str(exc))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
