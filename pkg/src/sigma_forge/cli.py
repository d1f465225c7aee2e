"""Command-line front end: ``sigma-forge <command> [options]``.

Exit status: 0 when every check passes, 1 when a check fails (the report is
still written), 2 for invalid configuration or an unwritable output path.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import resources

import jsonschema

from sigma_forge import __version__
from sigma_forge.algebra.hbar import HbarSeries
from sigma_forge.algebra.series import TruncSeries, monomials_upto, parse_ratio
from sigma_forge.errors import ConfigError, SigmaForgeError
from sigma_forge.target_geometry import MetricJet, sphere_graph_metric, sphere_normal_metric

COMMANDS = ("verify-wick", "verify-qme-finite", "verify-on-model", "beta", "cohomology", "cme")
DEFAULT_SEED = 20240607


# configuration


def _schema(name):
    return json.loads(resources.files("sigma_forge").joinpath("schemas", name).read_text(encoding="utf-8"))


def validate_target_config(data):
    schema = _schema("target_config.json")
    # validate against the branch named by "target" so the diagnostic is specific
    if isinstance(data, dict):
        branch = {"sphere": 0, "custom": 1}.get(data.get("target"))
        if branch is not None:
            schema = schema["oneOf"][branch]
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"target config invalid at {where}: {exc.message}") from None
    return data


def _custom_metric(data):
    n, k = data["dim"], data["cutoff"]
    seen = {}
    for pos, term in enumerate(data["metric_terms"]):
        i, j, mi = term["i"], term["j"], tuple(term["multi_index"])
        loc = f"metric_terms[{pos}]"
        if i >= n or j >= n:
            raise ConfigError(f"{loc}: index ({i},{j}) out of range for dim {n}")
        if len(mi) != n:
            raise ConfigError(f"{loc}: multi_index has length {len(mi)}, expected {n}")
        if sum(mi) > k:
            raise ConfigError(f"{loc}: multi_index degree {sum(mi)} exceeds cutoff {k}")
        try:
            c = parse_ratio(term["coeff"])
        except ValueError as exc:
            raise ConfigError(f"{loc}: {exc}") from None
        if (i, j, mi) in seen:
            raise ConfigError(f"{loc}: duplicate term ({i},{j}) {list(mi)}")
        seen[i, j, mi] = (c, loc)
    comps = {}
    for (i, j, mi), (c, loc) in seen.items():
        if i != j:
            other = seen.get((j, i, mi))
            if other is None or other[0] != c:
                got = "missing" if other is None else str(other[0])
                raise ConfigError(f"{loc}: asymmetric metric term at ({i},{j}) multi_index {list(mi)}: {c} vs ({j},{i}) {got}")
            if i > j:
                continue
        key = (min(i, j), max(i, j))
        comps.setdefault(key, {})[mi] = c
    series = {key: TruncSeries(n, k, terms) for key, terms in comps.items()}
    try:
        return MetricJet(n, k, series, data.get("chart", "other"))
    except SigmaForgeError as exc:
        raise ConfigError(f"metric_terms: {exc}") from None


def load_target_config(path_or_data):
    """Validate a target config (path or dict) and build its metric."""
    if isinstance(path_or_data, dict):
        data = path_or_data
    else:
        try:
            with open(path_or_data, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    validate_target_config(data)
    if data["target"] == "sphere":
        chart = data.get("chart", "graph")
        try:
            if chart == "normal":
                metric = sphere_normal_metric(data["N"], data["cutoff"])
            else:
                metric = sphere_graph_metric(data["N"], data["cutoff"])
        except (ValueError, SigmaForgeError) as exc:
            raise ConfigError(str(exc)) from None
        return dict(data, chart=chart), metric
    return data, _custom_metric(data)


def thread_count(env=None):
    env = os.environ if env is None else env
    raw = env.get("SIGMA_FORGE_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"SIGMA_FORGE_THREADS must be a positive integer, got {raw!r}")
    return n


def _pmap(fn, items, threads):
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# rendering helpers


def dual(x, scale=1.0):
    x = Fraction(x)
    return {"exact": str(x), "float": float(x) * scale}


def _matrix_text(M):
    return [[str(Fraction(x)) for x in row] for row in M]


def _residual_text(series_list, top):
    for s in series_list:
        t = TruncSeries(s.nvars, s.cutoff, {e: c for e, c in s.terms.items() if sum(e) <= top})
        if not t.is_zero():
            return t.to_text()
    return "0"


def check_record(check, target, cutoff, ok, residual="0", notes=(), **extra):
    rec = {
        "check": check,
        "target": target,
        "cutoff": cutoff,
        "status": "pass" if ok else "fail",
        "residual": residual,
        "notes": list(notes),
    }
    rec.update(extra)
    return rec


def _monomial_name(e):
    if not any(e):
        return "1"
    if len(e) == 1:
        return "x" if e[0] == 1 else f"x^{e[0]}"
    parts = []
    for i, k in enumerate(e):
        if k:
            parts.append(f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}")
    return "*".join(parts)


# commands


def _random_spd(rng, d):
    B = [[rng.randint(-2, 2) for _ in range(d)] for _ in range(d)]
    return [[sum(B[i][k] * B[j][k] for k in range(d)) + int(i == j) for j in range(d)] for i in range(d)]


def run_wick(cfg):
    from sigma_forge.algebra.linalg import inverse
    from sigma_forge.wick_engine import full_contraction_value, gauss_hermite_expectation, wick_expectation

    d, top = cfg["dim"], cfg["max_degree"]
    if not 1 <= d <= 6 or top < 0:
        raise ConfigError("verify-wick needs 1 <= dim <= 6 and max-degree >= 0")
    rng = random.Random(cfg["seed"])
    mats = [("identity", [[int(i == j) for j in range(d)] for i in range(d)]), ("random_spd", _random_spd(rng, d))]
    checks = []
    for tag, A in mats:
        P = inverse([[Fraction(x) for x in row] for row in A])
        records, bad = [], []
        for e in monomials_upto(d, top):
            f = TruncSeries.monomial(d, max(top, 1), e, 1)
            v_perm = wick_expectation(A, e)
            v_con = full_contraction_value(P, f)
            gh = gauss_hermite_expectation(A, e)
            ok = v_perm == v_con and abs(gh - float(v_perm)) <= 1e-8 * max(1.0, abs(float(v_perm)))
            name = _monomial_name(e)
            if not ok:
                bad.append(name)
            records.append({"monomial": name, "value": str(v_perm), "value_float": float(v_perm), "contraction": str(v_con), "quadrature": gh, "status": "pass" if ok else "fail"})
        checks.append(
            check_record(
                f"wick_{tag}",
                {"dim": d, "matrix": _matrix_text(A)},
                top,
                not bad,
                residual=str(len(bad)),
                notes=[f"failing monomials: {', '.join(bad)}"] if bad else [],
                records=records,
            )
        )
    return checks


def _random_poly(rng, n, degree, nterms):
    terms = {}
    for _ in range(nterms):
        e = [0] * n
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(n)] += 1
        terms[tuple(e)] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return TruncSeries(n, degree, terms)


def run_qme(cfg):
    from sigma_forge.wick_engine import (
        GaussianModel,
        bv_operators,
        effective_interaction,
        scale_descent_check,
        spanning_set,
        square_zero_residual,
    )

    d, top, count = cfg["dim"], cfg["max_degree"], cfg["models"]
    if not 1 <= d <= 4 or top < 1 or count < 1:
        raise ConfigError("verify-qme-finite needs 1 <= dim <= 4, max-degree >= 1 and models >= 1")
    rng = random.Random(cfg["seed"])
    checks = []
    # (Q + hbar div)^2 on spanning sets
    bad_sq = 0
    for n in range(1, d + 1):
        model = GaussianModel([rng.randint(1, 5) for _ in range(n)])
        ops = bv_operators(model, cutoff=max(model.eigenvalues) if rng.random() < 0.5 else None)
        bad_sq += square_zero_residual(ops, spanning_set(n, min(top, 3)))
    checks.append(check_record("bv_square_zero", {"dim": d}, min(top, 3), bad_sq == 0, residual=str(bad_sq)))
    # scale descent on random models
    failures, vacuous = [], 0
    for m in range(count):
        n = rng.randint(1, d)
        lam = [rng.randint(1, 6) for _ in range(n)]
        cut = Fraction(rng.choice(sorted(set(lam))))
        model = GaussianModel(lam)
        V = [_random_poly(rng, n, top, 3) for _ in range(n)]
        res = scale_descent_check(model, V, cut)
        if res.vacuous:
            vacuous += 1
        elif not res.ok:
            failures.append(f"model {m}: {res.residual.to_text().strip()}")
    checks.append(
        check_record(
            "scale_descent",
            {"dim": d, "models": count},
            top,
            not failures,
            residual=str(len(failures)),
            notes=failures + [f"{vacuous} models had no eigenvalue split"],
        )
    )
    # semigroup of the effective interaction
    H, D = cfg["hbar_cutoff"], top
    n = d
    I0 = TruncSeries(n, D, {e: c for e, c in _random_poly(rng, n, D, 4).terms.items() if sum(e) >= 3})
    I1 = _random_poly(rng, n, D, 2)
    I = HbarSeries(H, [I0] + [I1] * H if H else [I0])
    lam = [rng.randint(1, 4) for _ in range(n)]
    P1 = [[Fraction(1, 2 * lam[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    P2 = [[Fraction(1, 2 * lam[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    P12 = [[P1[i][j] + P2[i][j] for j in range(n)] for i in range(n)]
    one = effective_interaction(I, P12, H, D)
    mid = effective_interaction(I, P1, H, D + 2 * H)
    two = effective_interaction(mid, P2, H, D)
    diff = [a - b for a, b in zip(one.coefficients, two.coefficients)]
    checks.append(
        check_record(
            "effective_interaction_semigroup",
            {"dim": n, "hbar_cutoff": H},
            D,
            all(x.is_zero() for x in diff),
            residual=_residual_text(diff, D),
        )
    )
    return checks


def _sphere_target(cfg):
    t = cfg["target"]
    if t.get("target") != "sphere":
        raise ConfigError(f"{cfg['command']} needs a sphere target")
    return t["N"], cfg["cutoff"]


def run_on_model(cfg, threads):
    from sigma_forge import sigma_oneloop as so

    N, k = _sphere_target(cfg)
    if N < 3 or k < 4 or k % 2:
        raise ConfigError("verify-on-model needs N >= 3 and an even cutoff >= 4")
    target = {"target": "sphere", "N": N}
    lam, mu = cfg["lam"], cfg["mu"]

    def identity_I():
        w = so.sphere_identity_I(N, k)
        ls = so.log_sigma(N, k)
        match = (w.wheel - ls).is_zero()
        notes = [
            "counterterm density = -(1/(4 pi eps)) * log sigma" if match else "wheel sum differs from log sigma",
            "amputated potential uses the squared denominator 1 - |pi|^2 so that 1 - F = 1/(1 - |pi|^2)",
        ]
        return check_record("identity_I", target, k, w.ok and match, _residual_text(w.residuals, w.trusted_degree), notes, counterterm=(-w.wheel).to_text(), channel=w.entry.channel.to_record())

    def identity_II():
        v = so.vector_counterterm(N, k)
        notes = list(v.notes)
        ok = v.ok
        if v.C is not None:
            expected = so.sigma_m2(N, k)
            if v.C != expected:
                ok = False
                notes.append("generator differs from sigma^-2")
            else:
                notes.append("generator C = sigma^-2; density C * sigma = sigma^-1")
        extra = {"dimension": v.dimension, "generator": v.C.to_text() if v.C is not None else ""}
        return check_record("identity_II", target, k, ok, str(v.residual + v.ode_residual), notes, **extra)

    def identity_III():
        m = so.metric_counterterm_check(N, k, lam, mu)
        return check_record(
            "identity_III",
            target,
            k,
            m.ok,
            str(m.residual + m.ct_residual),
            [f"W = -{lam} y^i d_i, mu = {mu}"],
            lam=str(lam),
            mu=str(mu),
        )

    def cme():
        return _cme_record(N, k, None, target)

    return _pmap(lambda f: f(), [identity_I, identity_II, identity_III, cme], threads)


def _cme_record(N, k, metric, target):
    from sigma_forge import sigma_oneloop as so

    r = so.classical_master_residual(N, k, metric)
    res = {"invariance": r.invariance, "homomorphism": r.homomorphism, "jacobi": r.jacobi}
    notes = [] if r.ok else [f"first non-invariant component: {r.witness.to_text().strip()}" if r.witness is not None else "residual nonzero"]
    return check_record("cme", target, k, r.ok, "0" if r.ok else str(sum(res.values())), notes, residuals=res)


def run_cme(cfg, metric):
    t = cfg["target"]
    k = cfg["cutoff"]
    if t["target"] == "sphere":
        N = t["N"]
        metric = sphere_graph_metric(N, k) if k != metric.cutoff or getattr(metric, "chart", "") != "graph" else metric
        return [_cme_record(N, k, metric, {"target": "sphere", "N": N})]
    if metric.cutoff != k:
        raise ConfigError("cme on a custom target uses the config cutoff")
    N = metric.nvars + 1
    return [_cme_record(N, k, metric, {"target": "custom", "dim": metric.nvars})]


def run_beta(cfg, metric):
    from sigma_forge import sigma_oneloop as so
    from sigma_forge.errors import PreconditionError

    t = cfg["target"]
    if t["target"] == "sphere":
        try:
            metric = sphere_normal_metric(t["N"], cfg["cutoff"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        target = {"target": "sphere", "N": t["N"], "chart": "normal"}
    else:
        target = {"target": "custom", "dim": metric.nvars, "chart": metric.chart}
    try:
        rep = so.beta_report(metric)
    except PreconditionError as exc:
        raise ConfigError(str(exc)) from None
    extra = {"B": _matrix_text(rep.B), "ricci": _matrix_text(rep.ricci), "proportional": rep.proportional}
    if rep.ratio is not None:
        extra["ratio"] = {"exact": str(rep.ratio), "units": "1/(4pi)", "float": rep.ratio_absolute}
        extra["trace_ratio"] = dual(rep.trace_ratio)
        extra["sign"] = "positive" if rep.ratio > 0 else "negative"
    notes = list(rep.notes)
    c = rep.ratio
    if c is None:
        # no common scalar; measure against the expected coefficient instead
        c = Fraction(1, 3)
        notes.append("residual measured against B = 1/3 Ric")
    n = len(rep.B)
    off = [rep.B[i][j] - c * rep.ricci[i][j] for i in range(n) for j in range(n)]
    residual = str(max((abs(x) for x in off), default=Fraction(0)))
    return [check_record("beta", target, metric.cutoff, rep.verdict == "pass", residual, notes, **extra)]


def run_cohomology(cfg, threads):
    from sigma_forge import lie_cohomology as lc
    from sigma_forge import sigma_oneloop as so

    N, k = _sphere_target(cfg)
    g = lc.build_so(N)
    mods = [("trivial", lc.trivial_rep(g)), ("standard", lc.standard_rep(g)), ("adjoint", lc.adjoint_rep(g))]
    if N >= 3:
        mods.append(("sym2_standard", lc.sym2_rep(lc.standard_rep(g))))

    def one(item):
        name, rep = item
        recs = lc.cohomology_records(rep)
        d2 = all(lc.d_squared_is_zero(rep, p) for p in range(g.dim))
        euler = lc.euler_characteristic_check(rep)
        dims = [r["dim_H"] for r in recs]
        notes = []
        ok = d2 and euler
        if N >= 3:
            vanish = all(dims[p] == 0 for p in (1, 2) if p < len(dims))
            notes.append("H^1 = H^2 = 0" if vanish else "H^1 or H^2 nonzero")
            ok = ok and vanish
        for r in recs:
            r["module"] = name
        return check_record(
            "cohomology",
            {"algebra": g.name, "module": name},
            None,
            ok,
            "0" if d2 else "d^2 != 0",
            notes,
            records=recs,
            dims=dims,
        )

    checks = _pmap(one, mods, threads)
    if N >= 3 and k >= 4:
        v = so.vector_counterterm(N, k)
        checks.append(
            check_record(
                "cocycle_space",
                {"target": "sphere", "N": N},
                k,
                v.dimension == 1 and v.residual == 0,
                str(v.residual),
                v.notes,
                dimension=v.dimension,
            )
        )
    return checks


# reports


def build_report(cfg, checks):
    return {
        "tool": "sigma-forge",
        "version": __version__,
        "command": cfg["command"],
        "config": {k: v for k, v in cfg.items() if k not in ("output", "format", "command")},
        "seed": cfg["seed"],
        "status": "pass" if all(c["status"] == "pass" for c in checks) else "fail",
        "checks": checks,
    }


def render_report(report, fmt="json"):
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "target", "cutoff", "status", "residual", "notes"])
    for c in report["checks"]:
        w.writerow([
            c["check"],
            json.dumps(c["target"], sort_keys=True, separators=(",", ":")),
            "" if c["cutoff"] is None else c["cutoff"],
            c["status"],
            c["residual"].strip().replace("\n", "; "),
            "; ".join(c["notes"]),
        ])
    return buf.getvalue()


def emit_report(report, fmt="json", output=None):
    text = render_report(report, fmt)
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write report: {exc}") from None


# argument handling


def build_parser():
    p = argparse.ArgumentParser(prog="sigma-forge", description="Exact verification suites for one-loop sigma-model computations.")
    p.add_argument("--version", action="version", version=f"sigma-forge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="target config JSON")
        s.add_argument("--target", choices=["sphere"], default=None)
        s.add_argument("--N", type=int, default=None)
        s.add_argument("--cutoff", type=int, default=None)
        s.add_argument("--hbar-cutoff", type=int, default=1)
        s.add_argument("--dim", type=int, default=None)
        s.add_argument("--max-degree", type=int, default=None)
        s.add_argument("--models", type=int, default=50)
        s.add_argument("--lam", default="1")
        s.add_argument("--mu", default="0")
        s.add_argument("--seed", type=int, default=DEFAULT_SEED)
        s.add_argument("--format", choices=["json", "csv"], default="json")
        s.add_argument("--output", "-o", default=None)
    return p


def make_config(args):
    cfg = {"command": args.command, "seed": args.seed, "format": args.format, "output": args.output}
    if args.command in ("verify-wick", "verify-qme-finite"):
        defaults = {"verify-wick": (2, 6), "verify-qme-finite": (3, 4)}[args.command]
        cfg["dim"] = defaults[0] if args.dim is None else args.dim
        cfg["max_degree"] = defaults[1] if args.max_degree is None else args.max_degree
        if args.command == "verify-qme-finite":
            cfg["models"] = args.models
            cfg["hbar_cutoff"] = args.hbar_cutoff
            if args.hbar_cutoff < 0:
                raise ConfigError("hbar-cutoff must be >= 0")
        return cfg, None
    if args.config:
        data, metric = load_target_config(args.config)
        if args.cutoff is not None and args.cutoff != data["cutoff"]:
            data = dict(data, cutoff=args.cutoff)
            data, metric = load_target_config(data)
    else:
        data = {"target": args.target or "sphere", "N": 3 if args.N is None else args.N, "cutoff": 6 if args.cutoff is None else args.cutoff}
        data, metric = load_target_config(data)
    cfg["target"] = {k: v for k, v in data.items() if k != "metric_terms"}
    if "metric_terms" in data:
        cfg["target"]["metric_terms"] = len(data["metric_terms"])
    cfg["cutoff"] = data["cutoff"]
    if args.command == "verify-on-model":
        try:
            cfg["lam"], cfg["mu"] = parse_ratio(args.lam), parse_ratio(args.mu)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return cfg, metric


def run(cfg, metric=None, threads=1):
    cmd = cfg["command"]
    if cmd == "verify-wick":
        checks = run_wick(cfg)
    elif cmd == "verify-qme-finite":
        checks = run_qme(cfg)
    elif cmd == "verify-on-model":
        checks = run_on_model(cfg, threads)
    elif cmd == "beta":
        checks = run_beta(cfg, metric)
    elif cmd == "cohomology":
        checks = run_cohomology(cfg, threads)
    elif cmd == "cme":
        checks = run_cme(cfg, metric)
    else:  # pragma: no cover - argparse restricts the choices
        raise ConfigError(f"unknown command {cmd}")
    clean = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in cfg.items()}
    return build_report(clean, checks)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = thread_count()
        cfg, metric = make_config(args)
        report = run(cfg, metric, threads)
        emit_report(report, cfg["format"], cfg["output"])
    except ConfigError as exc:
        print(f"sigma-forge: error: {exc}", file=sys.stderr)
        return 2
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
