"""``pkl``: command-line access to every operation over JSON documents.

Exit codes: 0 when the computation succeeded and its verdict is affirmative
(psd / feasible / valid), 1 when it succeeded with a negative verdict, 2 on
input or usage errors. Randomness (``random`` point blocks, ``--shuffles``)
is driven only by ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

import jsonschema
import numpy as np

from . import codec
from .errors import InfeasibleBase, PickKernelError
from .kernel_core import PointSet, as_point, assemble_gram, psd_check
from .multiplier import (
    defect_gram,
    grid_scan_disk,
    multiplier_norm,
    one_point_extension_disk,
    pick_feasible,
)
from .pick_analysis import (
    cpp_check,
    cpp_verdict,
    fz_gram,
    irreducibility_check,
    schur_complement_gram,
)
from .proof_engine import necessity_certificate, shuffled_certificates
from .schemas import INPUT_SCHEMAS

log = logging.getLogger("pickkernel.cli")

COMMANDS = tuple(INPUT_SCHEMAS)
GRID_AGREEMENT = 2e-3


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None = None
    output_format: str = "json"
    tolerance: float = 1e-9
    seed: int = 0
    shuffles: int = 0
    grid_check: float | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.seed < 0 or self.shuffles < 0:
            raise ValueError("seed and shuffles must be nonnegative")


def _points(doc, rng: np.random.Generator) -> PointSet:
    if isinstance(doc, dict) and "n" in doc and "points" not in doc:
        return PointSet.random_disk(int(doc["n"]), rng, float(doc.get("radius", 0.9)))
    return codec.dec_pointset(doc)


def _kernel(doc):
    return codec.dec_kernel(doc.get("kernel", "szego"))


def _warn_duplicates(name: str, pts: PointSet) -> None:
    dups = pts.duplicate_pairs()
    if dups:
        log.warning("%s has duplicate points at index pairs %s", name, dups)


def _affirm(ok: bool) -> int:
    return 0 if ok else 1


def _run_gram(doc, cfg, rng):
    pts = codec.dec_pointset(doc["points"])
    _warn_duplicates("points", pts)
    return 0, {"matrix": codec.enc_matrix(assemble_gram(_kernel(doc), pts).data)}


def _run_psd(doc, cfg, rng):
    report = psd_check(codec.dec_matrix(doc["matrix"]), cfg.tolerance)
    return _affirm(report.is_psd), codec.enc_psd(report)


def _run_fz(doc, cfg, rng):
    report = fz_gram(_kernel(doc), as_point(doc["z"]), codec.dec_pointset(doc["sample"]), cfg.tolerance)
    return _affirm(report.psd.is_psd), codec.enc_criterion(report)


def _run_kz(doc, cfg, rng):
    M = schur_complement_gram(_kernel(doc), as_point(doc["z"]), codec.dec_pointset(doc["sample"]))
    report = psd_check(M, cfg.tolerance)
    return _affirm(report.is_psd), {"matrix": codec.enc_matrix(M.data), "psd": codec.enc_psd(report)}


def _run_cpp(doc, cfg, rng):
    base = _points(doc["base_points"], rng)
    sample = _points(doc["sample"], rng)
    reports = cpp_check(_kernel(doc), base, sample, cfg.tolerance)
    verdict = cpp_verdict(reports)
    return _affirm(verdict == "psd"), {
        "verdict": verdict,
        "reports": [codec.enc_criterion(r) for r in reports],
    }


def _run_irreducible(doc, cfg, rng):
    report = irreducibility_check(_kernel(doc), codec.dec_pointset(doc["points"]))
    return _affirm(report.irreducible), codec.enc_irreducibility(report)


def _run_defect(doc, cfg, rng):
    data = codec.dec_multiplier(doc)
    c = float(doc.get("c", 1.0))
    D = defect_gram(data, c)
    report = psd_check(D, cfg.tolerance)
    return _affirm(report.is_psd), {
        "c": c, "matrix": codec.enc_matrix(D.data), "psd": codec.enc_psd(report),
    }


def _run_multnorm(doc, cfg, rng):
    tol = float(doc.get("tol", 1e-8))
    return 0, {"norm": multiplier_norm(codec.dec_multiplier(doc), tol), "tol": tol}


def _run_pick(doc, cfg, rng):
    pts = codec.dec_pointset(doc["z"])
    _warn_duplicates("z", pts)
    report = pick_feasible(pts, doc["w"], _kernel(doc), cfg.tolerance)
    return _affirm(report.is_psd), codec.enc_pick(report)


def _run_extend(doc, cfg, rng):
    spec = _kernel(doc)
    pts = codec.dec_pointset(doc["z"])
    z_new = as_point(doc["z_new"])
    try:
        disk = one_point_extension_disk(pts, doc["w"], z_new, spec, cfg.tolerance)
    except InfeasibleBase as exc:
        return 1, {"empty": True, "reason": exc.code, "detail": str(exc)}
    out = codec.enc_disk(disk)
    ok = not disk.empty
    if cfg.grid_check is not None:
        grid = grid_scan_disk(pts, doc["w"], z_new, spec, cfg.grid_check, cfg.tolerance)
        if disk.empty or grid.empty:
            agrees = disk.empty == grid.empty
        else:
            bound = max(GRID_AGREEMENT, 2 * cfg.grid_check)
            agrees = (abs(grid.center - disk.center) <= bound
                      and abs(grid.radius - disk.radius) <= bound)
        out["grid_check"] = {
            "resolution": cfg.grid_check,
            "disk": codec.enc_disk(grid),
            "agrees": agrees,
        }
        ok = ok and agrees
    return _affirm(ok), out


def _run_prove(doc, cfg, rng):
    spec = _kernel(doc)
    ordering = _points(doc["ordering"], rng)
    _warn_duplicates("ordering", ordering)
    if cfg.shuffles:
        runs = shuffled_certificates(spec, ordering, cfg.shuffles, cfg.seed, cfg.tolerance)
        cert = runs[0][1]
        out = codec.enc_certificate(cert)
        out["shuffles"] = [{"permutation": p, "overall": c.overall} for p, c in runs[1:]]
        return _affirm(all(c.valid for _, c in runs)), out
    cert = necessity_certificate(spec, ordering, cfg.tolerance)
    return _affirm(cert.valid), codec.enc_certificate(cert)


_HANDLERS = {
    "gram": _run_gram,
    "psd": _run_psd,
    "fz": _run_fz,
    "kz": _run_kz,
    "cpp": _run_cpp,
    "irreducible": _run_irreducible,
    "defect": _run_defect,
    "multnorm": _run_multnorm,
    "pick": _run_pick,
    "extend": _run_extend,
    "prove": _run_prove,
}


def error_document(code: str, detail: str) -> dict:
    return {"error": code, "detail": detail}


def run(config: RunConfig, data: bytes | str) -> tuple[int, dict]:
    """Execute one command on a raw JSON input; returns ``(exit_code, document)``."""
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        return 2, error_document("invalid_json", str(exc))
    try:
        jsonschema.validate(doc, INPUT_SCHEMAS[config.command])
    except jsonschema.ValidationError as exc:
        return 2, error_document("schema_error", exc.message)
    rng = np.random.default_rng(config.seed)
    try:
        return _HANDLERS[config.command](doc, config, rng)
    except PickKernelError as exc:
        return 2, error_document(exc.code, str(exc))
    except (ValueError, KeyError, TypeError) as exc:
        return 2, error_document("invalid_input", str(exc))


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def render_text(command: str, doc: dict) -> str:
    if "error" in doc:
        return f"error: {doc['error']}: {doc['detail']}"
    lines = [f"command: {command}"]
    if "verdict" in doc:
        lines.append(f"verdict: {doc['verdict']}")
    if "min_eigenvalue" in doc:
        lines.append(f"min eigenvalue: {_fmt(doc['min_eigenvalue'])} (tolerance {_fmt(doc['tolerance'])})")
    if "psd" in doc:
        lines.append(f"verdict: {doc['psd']['verdict']}")
        lines.append(f"min eigenvalue: {_fmt(doc['psd']['min_eigenvalue'])}")
    if command == "cpp":
        for r in doc["reports"]:
            z = complex(*r["z"])
            lines.append(f"  z={z:.4g}: {r['verdict']} (min eig {_fmt(r['min_eigenvalue'])})")
    if command == "irreducible":
        lines.append(f"nonvanishing: {doc['nonvanishing']}")
        lines.append(f"independent pairs: {doc['independent_pairs']}")
        if doc["offending_pairs"]:
            lines.append(f"offending pairs: {doc['offending_pairs']}")
    if command == "multnorm":
        lines.append(f"multiplier norm: {doc['norm']:.12g} (+/- {doc['tol']:g})")
    if command == "pick":
        lines.append(f"quotient form verdict: {doc['quotient_verdict']} (agree: {doc['forms_agree']})")
    if command == "extend":
        if doc.get("empty"):
            lines.append("feasible set: empty")
        else:
            c = complex(*doc["center"])
            lines.append(f"feasible disk: center {c:.10g}, radius {doc['radius']:.10g}")
        if "grid_check" in doc:
            lines.append(f"grid check agrees: {doc['grid_check']['agrees']}")
    if command == "prove":
        lines.append(f"overall: {json.dumps(doc['overall'])}")
        for step in doc["steps"]:
            failed = [c["name"] for c in step["checks"] if not c["passed"]]
            lines.append(f"  step {step['n']}: " + ("ok" if not failed else "FAILED " + ", ".join(failed)))
        for s in doc.get("shuffles", []):
            lines.append(f"  shuffle {s['permutation']}: {json.dumps(s['overall'])}")
    if "matrix" in doc and command in ("gram", "kz", "defect"):
        M = codec.dec_matrix(doc["matrix"])
        lines.append(np.array2string(M, precision=6, suppress_small=True))
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps(error_document("usage_error", message)), file=sys.stderr)
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", "-i", default=None, help="input JSON file (default: stdin)")
    common.add_argument("--tol", type=float, default=1e-9,
                        help="relative PSD tolerance coefficient (default 1e-9)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json")
    parser = _Parser(prog="pkl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "prove":
            p.add_argument("--shuffles", type=int, default=0,
                           help="also certify K seeded random orderings")
        if name == "extend":
            p.add_argument("--grid-check", type=float, default=None, metavar="RES",
                           help="compare against a brute-force grid scan at this resolution")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="pkl: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            input_path=args.input,
            output_format=args.format,
            tolerance=args.tol,
            seed=args.seed,
            shuffles=getattr(args, "shuffles", 0),
            grid_check=getattr(args, "grid_check", None),
        )
        if cfg.grid_check is not None and not 0 < cfg.grid_check < 1:
            raise ValueError("--grid-check resolution must be in (0, 1)")
    except ValueError as exc:
        print(json.dumps(error_document("usage_error", str(exc))), file=sys.stderr)
        return 2
    try:
        if cfg.input_path is None:
            raw = sys.stdin.read()
        else:
            with open(cfg.input_path, encoding="utf-8") as fh:
                raw = fh.read()
    except OSError as exc:
        print(json.dumps(error_document("io_error", str(exc))), file=sys.stderr)
        return 2
    code, doc = run(cfg, raw)
    if code == 2:
        print(json.dumps(doc), file=sys.stderr)
        return code
    if cfg.output_format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(render_text(cfg.command, doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
