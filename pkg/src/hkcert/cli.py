"""hkcert command line: construct certificates, verify them, generate instances.

Exit codes: 0 success, 1 verification failure, 2 input/format error,
3 search budget exhausted.  No environment variables are read.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import certificate as cert
from . import construction
from .errors import ConstructionInvariantViolated, SearchExhausted
from .instance import normalize_brauer, random_instance, validate_instance
from .lattice import norm

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def cmd_construct(input_path, output_path, coeff_bound=16, u_budget=10**6,
                  t_budget=10**6, isometry_budget=10000, out=sys.stdout):
    try:
        inst = cert.instance_from_payload(cert.read_json(input_path))
    except (OSError, cert.CertificateFormatError) as exc:
        print(f"error: {input_path}: {exc}", file=out)
        return EXIT_INPUT
    try:
        if norm(inst.B) <= 0:
            inst = normalize_brauer(inst)
        failures = [c for c in validate_instance(inst) if not c.ok]
        if failures:
            bad = failures[0]
            print(f"error: invalid instance: {bad.name} {bad.details}".rstrip(), file=out)
            return EXIT_INPUT
        rec = construction.run_pipeline(
            inst,
            coeff_bound=coeff_bound,
            u_budget=u_budget,
            t_budget=t_budget,
            isometry_budget=isometry_budget,
        )
        wall = construction.wall_for_record(inst, rec)
    except SearchExhausted as exc:
        print(f"error: search exhausted: {exc}", file=out)
        return EXIT_BUDGET
    except ConstructionInvariantViolated as exc:
        print(f"error: {exc}", file=out)
        return EXIT_FAIL
    budgets = {
        "coeff_bound": coeff_bound,
        "u_budget": u_budget,
        "t_budget": t_budget,
        "isometry_budget": isometry_budget,
    }
    payload = cert.certificate_payload(inst, rec, wall, budgets)
    cert.write_json(output_path, payload)
    print(
        f"{output_path}: C1={rec.C1} u={rec.u} g={rec.g} t={rec.t} H2={rec.H2} "
        f"v0=({rec.v0.r},{rec.v0.m},{rec.v0.s}) epsilon={rec.epsilon} "
        f"wall={wall.verdict}",
        file=out,
    )
    return EXIT_OK


def _verify_one(path):
    lines = []
    try:
        payload = cert.read_json(path)
        checks = cert.verify_payload(payload)
    except (OSError, cert.CertificateFormatError) as exc:
        return EXIT_INPUT, [f"{path}: malformed certificate: {exc}"]
    bad = [c for c in checks if not c.ok]
    if bad:
        for c in bad:
            lines.append(f"{path}: FAIL {c.name} {c.details}".rstrip())
        return EXIT_FAIL, lines
    lines.append(f"{path}: OK ({len(checks)} checks)")
    return EXIT_OK, lines


def cmd_verify(paths, jobs=1, out=sys.stdout):
    results = []
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_verify_one, paths))
    else:
        results = [_verify_one(p) for p in paths]
    code = EXIT_OK
    for rc, lines in results:
        print("\n".join(lines), file=out)
        code = max(code, rc)
    return code


def cmd_random(n, pic_rank, c0, d_max, seed, count, out_dir, out=sys.stdout):
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        print(f"error: {out_dir}: {exc}", file=out)
        return EXIT_INPUT
    failed = []
    for i in range(count):
        sub_seed = seed + i
        try:
            inst = random_instance(n, pic_rank, c0, d_max, sub_seed)
        except ValueError as exc:
            print(f"error: {exc}", file=out)
            return EXIT_INPUT
        except SearchExhausted:
            failed.append(sub_seed)
            continue
        path = os.path.join(out_dir, f"instance_{seed}_{i:04d}.json")
        cert.write_json(path, cert.instance_to_payload(inst))
        print(path, file=out)
    if failed:
        print(f"error: generation exhausted for seeds {failed}", file=out)
        return EXIT_BUDGET
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hkcert",
        description="Construct and verify exact lattice certificates for the "
        "twisted derived-equivalence construction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="run the pipeline on an instance file")
    c.add_argument("-i", "--input", required=True, help="instance JSON")
    c.add_argument("-o", "--output", required=True, help="certificate JSON to write")
    c.add_argument("--budget-u", type=int, default=10**6, help="max step multiplier u")
    c.add_argument("--budget-t", type=int, default=10**6, help="max twist multiplier t")
    c.add_argument("--budget-isometry", type=int, default=10000,
                   help="max transvections per reduction")
    c.add_argument("--bound-coeff", type=int, default=16,
                   help="coefficient bound for the A/omega searches")

    v = sub.add_parser("verify", help="recheck certificates from their recorded data")
    v.add_argument("certs", nargs="+", help="certificate JSON files")
    v.add_argument("--jobs", type=int, default=1, help="verify files in parallel")

    r = sub.add_parser("random", help="write seeded random instance files")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--pic-rank", type=int, required=True)
    r.add_argument("--c0", type=int, required=True)
    r.add_argument("--d-max", type=int, default=3)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--count", type=int, default=1)
    r.add_argument("-o", "--out-dir", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "construct":
        return cmd_construct(
            args.input,
            args.output,
            coeff_bound=args.bound_coeff,
            u_budget=args.budget_u,
            t_budget=args.budget_t,
            isometry_budget=args.budget_isometry,
        )
    if args.command == "verify":
        return cmd_verify(args.certs, jobs=args.jobs)
    if args.command == "random":
        return cmd_random(
            args.n, args.pic_rank, args.c0, args.d_max, args.seed, args.count, args.out_dir
        )
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
