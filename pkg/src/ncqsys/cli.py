"""Command-line experiment runner: identity verification, graph and series
emission, system evolution reports, and golden-file regression."""

import argparse
import json
import os
import random
import sys

from .cfrac import canonicalize, fm_series, to_sexpr
from .errors import CheckFailed, NcqsysError, SingularMatrix
from .motzkin import MotzkinPath, WeightAssignment, build_graph, enumerate_motzkin
from .paths import (
    closed_walk_series,
    count_closed_walks,
    graph_series,
    lgv_commutative_check,
    nc_lgv_a1_check,
)
from .quasidet import (
    QuasiMatrix,
    RectMatrix,
    heredity_check,
    hirota_step,
    homological_check,
    quasi_plucker_check,
    quasi_wronskian,
)
from .rings import (
    CommLaurent,
    FreeLaurent,
    random_invertible_matrix,
    random_matrix,
)
from .systems import ncsys, qsys, quantum, tsys

GOLDEN_ENV = "NCQSYS_GOLDEN_DIR"
DEFAULT_GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def parse_motzkin(text):
    try:
        entries = tuple(int(v) for v in text.split(","))
        return MotzkinPath(entries)
    except (ValueError, NcqsysError) as exc:
        raise ConfigError("bad motzkin path %r: %s" % (text, exc))


class ConfigError(Exception):
    pass


def sample_invertible(rng, dim, tries=200):
    for _ in range(tries):
        try:
            return random_invertible_matrix(rng, dim, lo=-3, hi=3)
        except SingularMatrix:
            continue
    raise ConfigError("could not sample an invertible matrix")


def weight_values(path, backend, rng, dim):
    count = 2 * path.r + 1
    if backend == "symbolic":
        gens = tuple("y%d" % a for a in range(1, count + 1))
        return [CommLaurent.gen(gens, a) for a in range(count)]
    if backend == "free":
        gens = tuple("y%d" % a for a in range(1, count + 1))
        return [FreeLaurent.gen(gens, a) for a in range(count)]
    if backend == "matrix":
        return [sample_invertible(rng, dim) for _ in range(count)]
    raise ConfigError("unknown backend %r" % backend)


def make_assignment(path, backend, seed, dim):
    rng = random.Random(seed)
    return WeightAssignment(path, weight_values(path, backend, rng, dim))


# ---------------------------------------------------------------------------
# reports


def assertion(name, status, detail=""):
    return {"name": name, "status": status, "detail": detail}


def run_assertions(checks):
    """checks: list of (name, callable); returns (assertions, all_passed)."""
    results = []
    ok = True
    for name, fn in checks:
        try:
            fn()
            results.append(assertion(name, "pass"))
        except (CheckFailed, AssertionError, NcqsysError) as exc:
            results.append(assertion(name, "fail", str(exc)))
            ok = False
    return results, ok


def write_report(report, out_path):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def identity_report(identity, backend, seed, window, ok):
    return {
        "identity": identity,
        "backend": backend,
        "seed": seed,
        "window": window,
        "status": "pass" if ok else "fail",
        "max_discrepancy": "0" if ok else "nonzero",
    }


# ---------------------------------------------------------------------------
# verify-* subcommands


def cmd_verify_hirota(args):
    rng = random.Random(args.seed)
    ok = True
    details = []
    trials = 0
    while trials < max(args.r, 1):
        seq = {
            n: random_matrix(rng, args.dim, lo=-3, hi=3)
            for n in range(-args.window - 7, args.window + 8)
        }
        try:
            delta = {}
            cache = {}
            for i in range(0, 6):
                for n in range(-args.window - 1, args.window + 2):
                    delta[(i, n)] = quasi_wronskian(seq, i, n, cache)
            for i in range(1, 5):
                for n in range(-args.window, args.window + 1):
                    if hirota_step(delta, i, n) != delta[(i + 1, n)]:
                        ok = False
                        details.append("i=%d n=%d" % (i, n))
        except NcqsysError:
            continue
        trials += 1
    report = identity_report("hirota", args.backend, args.seed, args.window, ok)
    if details:
        report["detail"] = details
    write_report(report, args.report)
    return 0 if ok else 1


def cmd_verify_pluecker(args):
    rng = random.Random(args.seed)
    ok = True
    done = 0
    while done < args.count:
        try:
            A = RectMatrix(
                [
                    [random_matrix(rng, args.dim, lo=-3, hi=3) for _ in range(4)]
                    for _ in range(2)
                ]
            )
            quasi_plucker_check(A, M=(3,), L=(2, 4), i=1)
            B = QuasiMatrix(
                [
                    [random_matrix(rng, args.dim, lo=-3, hi=3) for _ in range(3)]
                    for _ in range(3)
                ]
            )
            homological_check(B, 1, 1, 3, 2)
            zero = B.entry(1, 1).zero()
            rows = [
                [random_matrix(rng, args.dim, lo=-3, hi=3) for _ in range(3)]
                for _ in range(3)
            ]
            for x in range(2):
                rows[x][2] = zero
            heredity_check(QuasiMatrix(rows))
        except CheckFailed:
            ok = False
            done += 1
        except NcqsysError:
            continue
        else:
            done += 1
    report = identity_report("pluecker", args.backend, args.seed, args.window, ok)
    write_report(report, args.report)
    return 0 if ok else 1


def cmd_verify_truncation(args):
    from .cfrac import denominator_coefficients
    from .cfrac import extend_sequence as cf_extend
    from .cfrac import truncation_check as cf_truncation

    rng = random.Random(args.seed)
    ok = True
    half = args.window // 2
    for r in range(1, args.r + 1):
        path = MotzkinPath(tuple(range(r)))
        while True:
            try:
                weights = WeightAssignment(
                    path, [sample_invertible(rng, args.dim) for _ in range(2 * r + 1)]
                )
                series = fm_series(weights, 2 * half + r + 4, check_positive=False)
                seq = {n: c for n, c in enumerate(series.coeffs)}
                coeffs = denominator_coefficients(list(weights.values))
                ext = cf_extend(seq, coeffs, -half - r - 4, 2 * half + r + 4)
                cf_truncation(ext, r, range(-half, half + 1))
            except CheckFailed:
                ok = False
            except NcqsysError:
                continue
            break
    report = identity_report("truncation", args.backend, args.seed, args.window, ok)
    write_report(report, args.report)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# graph / cfrac / paths


def graph_payload(graph):
    return {
        "vertices": [str(v) for v in graph.vertices],
        "edges": [
            {
                "u": str(e.u),
                "v": str(e.v),
                "tpow": e.tpow,
                "weight": e.weight.canonical_str(),
            }
            for e in graph.edges
        ],
        "root": str(graph.root),
        "flavor": graph.flavor,
    }


def graph_dot(graph):
    lines = ["digraph %s {" % graph.flavor]
    for v in graph.vertices:
        lines.append('  "%s";' % (v,))
    for e in graph.edges:
        lines.append(
            '  "%s" -> "%s" [label="t^%d %s"];'
            % (e.u, e.v, e.tpow, e.weight.canonical_str())
        )
    lines.append("}")
    return "\n".join(lines)


def cmd_graph_emit(args):
    path = parse_motzkin(args.motzkin)
    flavor = {"g": "G", "gamma": "Gamma", "gammaprime": "GammaPrime"}[args.flavor]
    assignment = make_assignment(path, args.backend, args.seed, args.dim)
    graph = build_graph(path, assignment, flavor)
    if args.format == "dot":
        text = graph_dot(graph)
        if args.report:
            with open(args.report, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    else:
        write_report(graph_payload(graph), args.report)
    return 0


def cmd_cfrac(args):
    path = parse_motzkin(args.motzkin)
    assignment = make_assignment(path, args.backend, args.seed, args.dim)
    if args.action == "canonical":
        node = canonicalize(assignment, order=args.order)
        print(to_sexpr(node))
        return 0
    series = fm_series(assignment, args.order, check_positive=False)
    for k, coeff in enumerate(series.coeffs):
        print("t^%d: %s" % (k, coeff.canonical_str()))
    return 0


def cmd_paths(args):
    path = parse_motzkin(args.motzkin)
    if args.action == "count":
        assignment = make_assignment(path, "symbolic", args.seed, args.dim)
        graph = build_graph(path, assignment, "G")
        rows = ["order,walks"]
        for k, count in enumerate(count_closed_walks(graph, args.order)):
            rows.append("%d,%d" % (k, count))
        print("\n".join(rows))
        return 0
    if args.action == "expand":
        assignment = make_assignment(path, args.backend, args.seed, args.dim)
        graph = build_graph(path, assignment, "Gamma")
        enum = closed_walk_series(graph, args.order)
        res = graph_series(graph, assignment, args.order)
        if enum != res:
            print("enumeration and resolvent disagree", file=sys.stderr)
            return 1
        rows = ["order,coefficient"]
        for k, coeff in enumerate(enum.coeffs):
            rows.append('%d,"%s"' % (k, coeff.canonical_str()))
        print("\n".join(rows))
        return 0
    raise ConfigError("unknown paths action %r" % args.action)


def cmd_paths_verify_lgv(args):
    path = parse_motzkin(args.motzkin)
    r = path.r
    rng = random.Random(args.seed)
    from fractions import Fraction

    R = {}
    for i in range(1, r + 1):
        R[(i, 0)] = Fraction(rng.randint(1, 4))
        R[(i, 1)] = Fraction(rng.randint(1, 4))

    def get(i, n):
        if i == 0 or i == r + 1:
            return Fraction(1)
        return R[(i, n)]

    span = args.order + max(path.entries) + r + 6
    for n in range(1, span):
        for i in range(1, r + 1):
            R[(i, n + 1)] = (get(i, n) ** 2 + get(i + 1, n) * get(i - 1, n)) / get(
                i, n - 1
            )
    table = {key: CommLaurent.const((), v) for key, v in R.items()}
    checks = []
    for alpha in range(1, r + 2):
        for n in range(max(0, alpha - 1), args.order + 1):
            checks.append(
                (
                    "lgv-alpha%d-n%d" % (alpha, n),
                    lambda a=alpha, m=n: lgv_commutative_check(path, table, a, m),
                )
            )
    assertions, ok = run_assertions(checks)
    write_report(
        {
            "system": "lgv",
            "params": {"motzkin": path.entries, "seed": args.seed, "order": args.order},
            "assertions": assertions,
            "artifacts": {},
        },
        args.report,
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# systems


def _systems_qsys(args):
    checks = [
        ("rank-one-sequence", lambda: qsys.rank_one_sequence(args.window)),
        (
            "laurent-positivity",
            lambda: qsys.positivity_check(
                args.r, args.window, paths=list(enumerate_motzkin(args.r))
            ),
        ),
        ("translation", lambda: qsys.translation_check(args.r, args.window, 2, args.seed)),
    ]
    artifacts = {
        "rank_one_sequence": [str(v) for v in qsys.rank_one_sequence(args.window)]
    }
    return checks, artifacts


def _systems_tsys(args):
    J = 12
    k_max = max(14, args.window + 8)
    state = tsys.random_tsystem(args.r, J, seed=args.seed, k_max=k_max)

    def operator():
        lo = args.r + 2
        tsys.tsystem_operator_check(state, range(lo, lo + 4))

    checks = [
        ("window", lambda: tsys.tsystem_window_check(state)),
        ("operator-action", operator),
        (
            "qsystem-reduction",
            lambda: tsys.qsystem_reduction_check(args.r, J, args.seed, 4),
        ),
    ]
    return checks, {"J": J, "k_max": k_max}


def _systems_quantum(args):
    checks = []
    for path in enumerate_motzkin(args.r):
        checks.append(
            (
                "positivity-%s" % (path.entries,),
                lambda p=path: quantum.quantum_positivity_check(
                    args.r, p, args.window
                ),
            )
        )
    checks.append(
        (
            "wronskian-expansions",
            lambda: quantum.wronskian_expansion_check(args.r, range(-1, 3)),
        )
    )
    return checks, {}


def _systems_a1nc(args):
    rng = random.Random(args.seed)
    R0 = sample_invertible(rng, args.dim)
    R1 = sample_invertible(rng, args.dim)
    checks = [
        (
            "conserved-and-series",
            lambda: ncsys.a1_nc_qsystem_check(R0, R1, args.window, order=args.order),
        ),
        ("qtorus-central", ncsys.a1_qtorus_check),
        ("commutative-constant", ncsys.a1_commutative_constant),
    ]
    return checks, {}


def _systems_affine14(args):
    rng = random.Random(args.seed)

    def run():
        for _ in range(100):
            try:
                R0 = sample_invertible(rng, args.dim)
                R1 = sample_invertible(rng, args.dim)
                ncsys.affine14_check(R0, R1, n_max=3, order=3)
                return
            except SingularMatrix:
                continue
        raise CheckFailed("affine14", "no invertible sample")

    checks = [
        ("weights-and-recursion", run),
        (
            "commutative-integers",
            lambda: ncsys.affine14_commutative_sequence(n_max=8),
        ),
    ]
    return checks, {}


def _systems_rank2k1(args):
    k = args.k
    rng = random.Random(args.seed)

    def run():
        for _ in range(200):
            try:
                init = [sample_invertible(rng, 3) for _ in range(2 * k + 1)]
                ncsys.rank2k1_check(k, init, n_max=2, order=2)
                ncsys.rank2k1_phi_check(k, init, n_max=4)
                return
            except SingularMatrix:
                continue
        raise CheckFailed("rank2k1", "no invertible sample")

    checks = [
        ("full-check", run),
        (
            "commutative-integers",
            lambda: ncsys.rank2k1_commutative_sequence(k, 10),
        ),
    ]
    return checks, {"k": k}


def _systems_noncoprime(args):
    rng = random.Random(args.seed)

    def run():
        for _ in range(100):
            try:
                R1 = sample_invertible(rng, args.dim)
                R2 = sample_invertible(rng, args.dim)
                ncsys.noncoprime_check(R1, R2, n_max=7)
                return
            except SingularMatrix:
                continue
        raise CheckFailed("noncoprime", "no invertible sample")

    return [("conserved-and-substitution", run)], {}


def _systems_rank2walk(args):
    periods = {(1, 1): 5, (1, 2): 6, (1, 3): 8}
    bc = (args.b, args.c)
    if bc not in periods:
        raise ConfigError("finite walk periods known only for bc in %s" % list(periods))
    period = periods[bc]
    checks = [
        (
            "period-%d" % period,
            lambda: ncsys.rank2_walk_check(bc, period, seed=args.seed, dim=args.dim),
        )
    ]
    return checks, {"b": args.b, "c": args.c, "period": period}


SYSTEM_BUILDERS = {
    "qsys": _systems_qsys,
    "tsys": _systems_tsys,
    "quantum": _systems_quantum,
    "a1nc": _systems_a1nc,
    "affine14": _systems_affine14,
    "rank2k1": _systems_rank2k1,
    "noncoprime": _systems_noncoprime,
    "rank2walk": _systems_rank2walk,
}


def cmd_systems(args):
    builder = SYSTEM_BUILDERS[args.system]
    try:
        checks, artifacts = builder(args)
    except ConfigError:
        raise
    assertions, ok = run_assertions(checks)
    write_report(
        {
            "system": args.system,
            "params": {
                "seed": args.seed,
                "window": args.window,
                "order": args.order,
                "backend": args.backend,
                "r": args.r,
            },
            "assertions": assertions,
            "artifacts": artifacts,
        },
        args.report,
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# golden regression


def golden_current():
    """Canonical serializations regenerated from scratch for regression."""
    out = {}
    out["a1_series.txt"] = (
        ",".join(str(v) for v in qsys.rank_one_sequence(8)) + "\n"
    )
    for path in enumerate_motzkin(2):
        state = quantum.cluster_state(2, path)
        lo = min(0, min(path.entries))
        hi = max(path.entries) + 1
        quantum.quantum_evolve(state, lo, hi)
        weights = quantum.quantum_weights(state, path)
        lines = [
            "y%d: %s" % (a, weights.y(a).canonical_str()) for a in range(1, 6)
        ]
        key = "quantum_weights_r2_%d%d.txt" % path.entries
        out[key] = "\n".join(lines) + "\n"
    return out


def cmd_golden(args):
    directory = args.dir or os.environ.get(GOLDEN_ENV, DEFAULT_GOLDEN)
    if not os.path.isdir(directory):
        print("golden directory %s missing" % directory, file=sys.stderr)
        return 2
    current = golden_current()
    names = sorted(os.listdir(directory))
    diffs = []
    for name in names:
        stored = open(os.path.join(directory, name)).read()
        got = current.get(name)
        if got is None:
            diffs.append("%s: no generator for this golden file" % name)
        elif got != stored:
            diffs.append("%s: regenerated output differs" % name)
    report = {
        "system": "golden",
        "params": {"dir": directory, "files": names},
        "assertions": [
            assertion("golden-%s" % n, "pass")
            for n in names
            if not any(d.startswith(n) for d in diffs)
        ]
        + [assertion(d.split(":")[0], "fail", d) for d in diffs],
        "artifacts": {},
    }
    write_report(report, args.report)
    return 0 if not diffs else 1


def cmd_golden_write(args):
    directory = args.dir or os.environ.get(GOLDEN_ENV, DEFAULT_GOLDEN)
    os.makedirs(directory, exist_ok=True)
    for name, text in golden_current().items():
        with open(os.path.join(directory, name), "w") as fh:
            fh.write(text)
    print("wrote %d golden files to %s" % (len(golden_current()), directory))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def add_common(parser, r_default=2):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--window", type=int, default=3)
    parser.add_argument("--order", type=int, default=6)
    parser.add_argument(
        "--backend", choices=("symbolic", "free", "matrix"), default="matrix"
    )
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--r", type=int, default=r_default)
    parser.add_argument("--report", default=None)
    parser.add_argument("--format", choices=("json", "csv", "dot"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ncqsys",
        description="Exact verification of discrete integrable-system identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-hirota")
    add_common(p)
    p.set_defaults(fn=cmd_verify_hirota)

    p = sub.add_parser("verify-pluecker")
    add_common(p)
    p.add_argument("--count", type=int, default=25)
    p.set_defaults(fn=cmd_verify_pluecker)

    p = sub.add_parser("verify-truncation")
    add_common(p)
    p.set_defaults(fn=cmd_verify_truncation)

    p = sub.add_parser("graph")
    p.add_argument("action", choices=("emit",))
    p.add_argument("--motzkin", required=True)
    p.add_argument("--flavor", choices=("g", "gamma", "gammaprime"), default="g")
    add_common(p)
    p.set_defaults(fn=cmd_graph_emit)

    p = sub.add_parser("cfrac")
    p.add_argument("action", choices=("expand", "canonical"))
    p.add_argument("--motzkin", required=True)
    add_common(p)
    p.set_defaults(fn=cmd_cfrac)

    p = sub.add_parser("paths")
    p.add_argument("action", choices=("count", "expand", "verify-lgv"))
    p.add_argument("--motzkin", required=True)
    add_common(p)
    p.set_defaults(
        fn=lambda a: cmd_paths_verify_lgv(a) if a.action == "verify-lgv" else cmd_paths(a)
    )

    p = sub.add_parser("systems")
    p.add_argument("system", choices=sorted(SYSTEM_BUILDERS))
    add_common(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--c", type=int, default=1)
    p.set_defaults(fn=cmd_systems)

    p = sub.add_parser("golden")
    p.add_argument("--dir", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--write", action="store_true")
    p.set_defaults(fn=lambda a: cmd_golden_write(a) if a.write else cmd_golden(a))

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
