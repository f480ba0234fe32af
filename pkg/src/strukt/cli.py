"""Command-line front end.

Subcommands: linearize | recover | perturb | certify | sigma-min | eigs.
Exit codes: 0 success, 1 certification failure, 2 usage or input error.
All commands are deterministic given identical inputs and seeds; per-trial
wall times are recorded only when --timings is passed so report files stay
byte-reproducible by default.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backward, linearize, polycore, spectra, sylvester
from .errors import StruktError
from .polycore import StructureKind

EXIT_OK = 0
EXIT_CERTIFICATION = 1
EXIT_USAGE = 2

ALL_KINDS = [k.value for k in StructureKind]


@dataclass
class ExperimentConfig:
    """Certification campaign description, loadable from a single JSON file."""

    kind: str = "symmetric"
    grade: int = 5
    n: int = 2
    placement: str = "tridiagonal"
    sigma: int = 0  # 0 picks the kind's canonical sign
    pert_norms: list = field(default_factory=lambda: [1e-8])
    trials: int = 20
    seed: int = 20240801
    mode: str = "certified"
    output: str | None = None
    format: str = "csv"

    def validate(self) -> "ExperimentConfig":
        kind = StructureKind(self.kind)
        if self.grade % 2 == 0 or self.grade < 1:
            raise StruktError("grade must be odd and positive")
        if self.n < 1:
            raise StruktError("n must be >= 1")
        if self.placement not in linearize.PLACEMENTS:
            raise StruktError(f"unknown placement {self.placement!r}")
        if self.trials < 1:
            raise StruktError("trials must be >= 1")
        if any(nrm < 0 for nrm in self.pert_norms):
            raise StruktError("perturbation norms must be nonnegative")
        if self.mode not in ("certified", "empirical"):
            raise StruktError("mode must be 'certified' or 'empirical'")
        if self.sigma == 0:
            self.sigma = kind.sigma
        if self.sigma not in (-1, 1):
            raise StruktError("sigma must be -1 or +1")
        if self.format not in ("csv", "json"):
            raise StruktError("format must be 'csv' or 'json'")
        return self

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            doc = json.load(fh)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise StruktError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc).validate()


def _parse_kind(name: str) -> StructureKind:
    try:
        return StructureKind(name)
    except ValueError:
        raise StruktError(
            f"unknown structure kind {name!r}; expected one of {ALL_KINDS}"
        ) from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_linearize(args) -> int:
    p = polycore.load_polynomial(args.input)
    kind = _parse_kind(args.kind)
    pencil = linearize.build_linearization(p, kind, args.placement, tol=args.tol)
    out = args.output or (str(Path(args.input).with_suffix("")) + ".pencil.json")
    linearize.save_pencil(pencil, out)
    residual = polycore.structure_residual(pencil.as_polynomial(), kind)
    print(f"norm_P={polycore.frob_norm(p)!r}")
    print(f"norm_M={polycore.frob_norm(pencil.m_pencil)!r}")
    print(f"k={pencil.k} n={pencil.n} kind={kind.value} sign={pencil.sign}")
    print(f"structure_residual={residual!r}")
    print(f"wrote {out} and {linearize.sidecar_path(out)}")
    return EXIT_OK


def cmd_recover(args) -> int:
    poly, record = linearize.load_pencil_file(args.pencil)
    k, n, kind = record["k"], record["n"], record["kind"]
    m11, _, _, _ = linearize.split_natural_partition(poly, k, n)
    recovered = linearize.recover_from_m(m11, k, n, kind, sign=record["sign"])
    out = args.output or (str(Path(args.pencil).with_suffix("")) + ".recovered.json")
    polycore.save_polynomial(recovered, out)
    print(f"sign={record['sign']} grade={recovered.grade}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_perturb(args) -> int:
    poly, record = linearize.load_pencil_file(args.pencil)
    k, n, kind = record["k"], record["n"], record["kind"]
    seed = args.seed if args.seed is not None else 0
    pert = backward.random_structured_perturbation(k, n, kind, args.norm, seed)
    perturbed = poly + pert.pencil()
    out = args.output or (str(Path(args.pencil).with_suffix("")) + ".perturbed.json")
    polycore.save_polynomial(perturbed, out)
    with open(linearize.sidecar_path(out), "w") as fh:
        json.dump({"k": k, "n": n, "kind": kind.value, "sign": record["sign"]}, fh)
    print(f"norm_dL={pert.norm()!r}")
    print(f"wrote {out} and {linearize.sidecar_path(out)}")
    return EXIT_OK


def cmd_sigma_min(args) -> int:
    kinds = [
        _parse_kind(name)
        for name in (args.kinds.split(",") if args.kinds else ALL_KINDS)
    ]
    failures = 0
    header = f"{'k':>3} {'kind':>16} {'formula':>20} {'svd':>20} {'rel_err':>10} {'red_diff':>10}"
    print(header)
    for k in range(1, args.kmax + 1):
        formula = sylvester.sigma_min_formula(k)
        for kind in kinds:
            full = np.linalg.svd(sylvester.build_TA(k, 1, kind), compute_uv=False)
            reduced = np.linalg.svd(
                sylvester.build_TA_reduced(k, kind), compute_uv=False
            )
            rel_err = abs(full[-1] - formula) / formula
            red_diff = float(np.max(np.abs(full - reduced)))
            print(
                f"{k:>3} {kind.value:>16} {formula:>20.14f} {full[-1]:>20.14f} "
                f"{rel_err:>10.2e} {red_diff:>10.2e}"
            )
            if rel_err > 1e-10:
                failures += 1
    if failures:
        print(f"{failures} entries above 1e-10 relative error")
        return EXIT_CERTIFICATION
    return EXIT_OK


def cmd_eigs(args) -> int:
    path = Path(args.input)
    kind = _parse_kind(args.kind) if args.kind else None
    if linearize.sidecar_path(path).exists():
        poly, record = linearize.load_pencil_file(path)
        spec = spectra.pencil_eigs(poly.coefficient(0), poly.coefficient(1))
        kind = kind or record["kind"]
    else:
        spec = spectra.reference_polyeigs(polycore.load_polynomial(path))
    rows = [
        {
            "alpha": [float(a.real), float(a.imag)],
            "beta": [float(b.real), float(b.imag)],
            "infinite": bool(inf),
        }
        for a, b, inf in zip(spec.alpha, spec.beta, spec.infinite_mask)
    ]
    doc = {"count": len(spec), "pairs": rows}
    if kind is not None:
        doc["kind"] = StructureKind(kind).value
        doc["symmetry_score"] = spectra.symmetry_check(spec, StructureKind(kind))
    text = json.dumps(doc)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        print(text)
    return EXIT_OK


def cmd_certify(args) -> int:
    if args.config:
        config = ExperimentConfig.from_json(args.config)
    else:
        config = ExperimentConfig().validate()
    if args.seed is not None:
        config.seed = args.seed
    if args.mode:
        config.mode = args.mode
    if args.output:
        config.output = args.output
    if args.format:
        config.format = args.format

    kind = StructureKind(config.kind)
    p = polycore.random_structured(
        config.n, config.grade, kind, target_norm=1.0, seed=config.seed
    )
    reports = backward.run_certification(
        p,
        kind,
        config.placement,
        config.pert_norms,
        config.trials,
        config.seed,
        mode=config.mode,
        compute_eigs=args.eigs,
    )
    if not args.timings:
        for rep in reports:
            rep.wall_ms = 0.0

    total = len(reports)
    passed = sum(1 for r in reports if r.ratio_le_bound and r.structure_ok)
    k = (config.grade - 1) // 2
    print(
        f"certify: {passed}/{total} trials within bound; "
        f"kind={kind.value} g={config.grade} n={config.n} "
        f"placement={config.placement} mode={config.mode}"
    )
    print(
        "simplified multiplier (valid when norm_M is close to norm_P): "
        f"{backward.corollary_factor(k, config.n)!r}"
    )
    if config.output:
        if config.format == "csv":
            backward.reports_to_csv(reports, config.output)
        else:
            backward.reports_to_json(reports, config.output)
        print(f"wrote {config.output}")
    if config.mode == "certified" and passed < total:
        return EXIT_CERTIFICATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strukt",
        description="Structure-preserving block Kronecker linearizations "
        "and backward-error certification for odd-grade matrix polynomials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="random seed where applicable")
    common.add_argument("--tol", type=float, default=1e-12, help="structure tolerance")
    common.add_argument("--mode", choices=["certified", "empirical"])
    common.add_argument("--output")
    common.add_argument("--format", choices=["csv", "json"])

    lin = sub.add_parser(
        "linearize", parents=[common],
        help="build a structured pencil from a polynomial file",
    )
    lin.add_argument("input")
    lin.add_argument("--kind", required=True, choices=ALL_KINDS)
    lin.add_argument("--placement", default="tridiagonal", choices=sorted(linearize.PLACEMENTS))
    lin.set_defaults(func=cmd_linearize)

    rec = sub.add_parser(
        "recover", parents=[common], help="recover the polynomial from a pencil file"
    )
    rec.add_argument("pencil")
    rec.set_defaults(func=cmd_recover)

    per = sub.add_parser(
        "perturb", parents=[common], help="write a structured perturbation of a pencil"
    )
    per.add_argument("pencil")
    per.add_argument("--norm", type=float, required=True)
    per.set_defaults(func=cmd_perturb)

    sig = sub.add_parser(
        "sigma-min", parents=[common],
        help="tabulate the system-matrix singular value law",
    )
    sig.add_argument("--kmax", type=int, default=6)
    sig.add_argument("--kinds", help="comma-separated subset of structure kinds")
    sig.set_defaults(func=cmd_sigma_min)

    eig = sub.add_parser(
        "eigs", parents=[common], help="eigenvalues of a polynomial or pencil file"
    )
    eig.add_argument("input")
    eig.add_argument("--kind", choices=ALL_KINDS)
    eig.set_defaults(func=cmd_eigs)

    cer = sub.add_parser("certify", parents=[common], help="run a certification campaign")
    cer.add_argument("config", nargs="?", help="JSON config; defaults are built in")
    cer.add_argument("--eigs", action="store_true", help="record eigenvalue transport per trial")
    cer.add_argument("--timings", action="store_true", help="record real wall times per trial")
    cer.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (StruktError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
